from app.application.use_cases import SolveExactUseCase
from app.application.use_cases import SolveTadpUseCase

__all__ = ['SolveExactUseCase', 'SolveTadpUseCase']
