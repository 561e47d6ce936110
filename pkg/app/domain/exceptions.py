from __future__ import annotations


class DomainError(Exception):
    pass


class ConfigError(DomainError):
    pass


class DfaError(DomainError):
    pass


class DfaParseError(DfaError):
    def __init__(self, message: str, line: int | None = None) -> None:
        self.line = line
        prefix = f'linha {line}: ' if line is not None else ''
        super().__init__(f'{prefix}{message}')


class DfaValidationError(DfaError):
    pass


class UnsatisfiableTaskError(DfaError):
    pass


class MdpError(DomainError):
    pass


class ProductError(DomainError):
    pass


class SolverError(DomainError):
    pass


class ConvergenceError(SolverError):
    def __init__(self, message: str, *, last_residual: float, sweeps: int) -> None:
        super().__init__(f'{message} residuo={last_residual:.3e} varreduras={sweeps}')
        self.last_residual = last_residual
        self.sweeps = sweeps


class DivergenceError(SolverError):
    def __init__(self, message: str, *, level: int, epoch: int, theta_norm: float) -> None:
        super().__init__(f'{message} nivel={level} epoca={epoch} norma_theta={theta_norm:.3e}')
        self.level = level
        self.epoch = epoch
        self.theta_norm = theta_norm


class SimulationError(DomainError):
    pass
