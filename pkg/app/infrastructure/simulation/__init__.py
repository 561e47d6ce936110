from app.infrastructure.simulation.product_simulator import ProductSimulator

__all__ = ['ProductSimulator']
