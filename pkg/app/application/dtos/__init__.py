from app.application.dtos.planning import DecomposeRequest
from app.application.dtos.planning import ExactSolverConfig
from app.application.dtos.planning import GridWorldConfig
from app.application.dtos.planning import RolloutConfig
from app.application.dtos.planning import SolveRequest
from app.application.dtos.planning import TADP_PRESETS
from app.application.dtos.planning import TadpConfig
from app.application.dtos.planning import parse_state_arg
from app.application.dtos.planning import state_from_id
from app.application.dtos.planning import state_to_id
from app.application.dtos.planning import validate_decompose_payload
from app.application.dtos.planning import validate_solve_payload

__all__ = [
    'DecomposeRequest',
    'ExactSolverConfig',
    'GridWorldConfig',
    'RolloutConfig',
    'SolveRequest',
    'TADP_PRESETS',
    'TadpConfig',
    'parse_state_arg',
    'state_from_id',
    'state_to_id',
    'validate_decompose_payload',
    'validate_solve_payload',
]
