from app.domain.services import build_product
from app.domain.services import decompose

__all__ = ['build_product', 'decompose']
