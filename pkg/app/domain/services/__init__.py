from app.domain.services.adp_solver import TadpParameters
from app.domain.services.adp_solver import TadpResult
from app.domain.services.adp_solver import build_kernel_basis
from app.domain.services.adp_solver import tadp_solve
from app.domain.services.automata_service import build_dfa
from app.domain.services.automata_service import coaccessible_trim
from app.domain.services.automata_service import run_word
from app.domain.services.automata_service import step
from app.domain.services.decomposition_service import decompose
from app.domain.services.decomposition_service import kosaraju_scc
from app.domain.services.exact_solver import extract_policy
from app.domain.services.exact_solver import topological_value_iteration
from app.domain.services.exact_solver import value_iteration
from app.domain.services.mdp_service import build_grid_world
from app.domain.services.product_service import build_product
from app.domain.services.simulation_service import sample_trajectory
from app.domain.services.simulation_service import simulate_policy

__all__ = [
    'TadpParameters',
    'TadpResult',
    'build_dfa',
    'build_grid_world',
    'build_kernel_basis',
    'build_product',
    'coaccessible_trim',
    'decompose',
    'extract_policy',
    'kosaraju_scc',
    'run_word',
    'sample_trajectory',
    'simulate_policy',
    'step',
    'tadp_solve',
    'topological_value_iteration',
    'value_iteration',
]
