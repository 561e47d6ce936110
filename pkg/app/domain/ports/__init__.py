from app.domain.ports.simulator import SimulatorPort

__all__ = ['SimulatorPort']
