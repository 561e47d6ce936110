from app.domain.entities.approx import KernelBasis
from app.domain.entities.approx import LagrangianState
from app.domain.entities.approx import ValueApprox
from app.domain.entities.automaton import AtomicPropositionSet
from app.domain.entities.automaton import TaskDfa
from app.domain.entities.automaton import mode_sort_key
from app.domain.entities.decomposition import Decomposition
from app.domain.entities.decomposition import LevelRepair
from app.domain.entities.decomposition import SccResult
from app.domain.entities.mdp import GRID_ACTIONS
from app.domain.entities.mdp import GridWorldSpec
from app.domain.entities.mdp import LabeledMdp
from app.domain.entities.product import ProductMdp
from app.domain.entities.product import ProductState
from app.domain.entities.simulation import RolloutStats
from app.domain.entities.simulation import Trajectory
from app.domain.entities.simulation import TrajectoryStep
from app.domain.entities.values import SoftPolicy
from app.domain.entities.values import ValueTable

__all__ = [
    'AtomicPropositionSet',
    'Decomposition',
    'GRID_ACTIONS',
    'GridWorldSpec',
    'KernelBasis',
    'LabeledMdp',
    'LagrangianState',
    'LevelRepair',
    'ProductMdp',
    'ProductState',
    'RolloutStats',
    'SccResult',
    'SoftPolicy',
    'TaskDfa',
    'Trajectory',
    'TrajectoryStep',
    'ValueApprox',
    'ValueTable',
    'mode_sort_key',
]
