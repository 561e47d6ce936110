from app.application.use_cases.decompose_task import DecomposeResult
from app.application.use_cases.decompose_task import DecomposeTaskUseCase
from app.application.use_cases.run_bench import BenchResult
from app.application.use_cases.run_bench import BenchRow
from app.application.use_cases.run_bench import RunBenchUseCase
from app.application.use_cases.simulate_policy import SimulatePolicyUseCase
from app.application.use_cases.simulate_policy import SimulationResult
from app.application.use_cases.solve_exact import ExactSolveResult
from app.application.use_cases.solve_exact import SolveExactUseCase
from app.application.use_cases.solve_tadp import SolveTadpUseCase
from app.application.use_cases.solve_tadp import TadpSolveResult

__all__ = [
    'BenchResult',
    'BenchRow',
    'DecomposeResult',
    'DecomposeTaskUseCase',
    'ExactSolveResult',
    'RunBenchUseCase',
    'SimulatePolicyUseCase',
    'SimulationResult',
    'SolveExactUseCase',
    'SolveTadpUseCase',
    'TadpSolveResult',
]
