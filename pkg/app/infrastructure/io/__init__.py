from app.infrastructure.io.config_loader import load_grid_config
from app.infrastructure.io.config_loader import load_tadp_config
from app.infrastructure.io.dfa_loader import load_dfa
from app.infrastructure.io.dfa_loader import parse_dfa
from app.infrastructure.io.mdp_loader import load_grid_world
from app.infrastructure.io.mdp_loader import load_sparse_mdp
from app.infrastructure.io.mdp_loader import parse_sparse_mdp

__all__ = [
    'load_dfa',
    'load_grid_config',
    'load_grid_world',
    'load_sparse_mdp',
    'load_tadp_config',
    'parse_dfa',
    'parse_sparse_mdp',
]
