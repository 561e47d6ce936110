from __future__ import annotations

from dataclasses import dataclass, field
from types import MappingProxyType
from typing import Hashable, Mapping

import numpy as np

from app.domain.exceptions import SolverError


@dataclass
class ValueTable:
    values: np.ndarray
    backup_count: int = 0
    sweeps: int = 0
    residual: float = 0.0
    alpha: float = 1.0
    wall_time_s: float = 0.0
    level_backups: tuple[int, ...] = ()
    level_sweeps: tuple[int, ...] = ()

    def deamplified(self) -> np.ndarray:
        return self.values / self.alpha

    def summary(self) -> dict[str, float | int | list[int]]:
        return {
            'backup_count': int(self.backup_count),
            'sweeps': int(self.sweeps),
            'wall_time_s': round(float(self.wall_time_s), 6),
            'residual': float(self.residual),
            'level_backups': [int(item) for item in self.level_backups],
        }


@dataclass(frozen=True)
class SoftPolicy:
    states: tuple[Hashable, ...]
    actions: tuple[str, ...]
    dist: np.ndarray
    q_values: np.ndarray
    deterministic: bool = False
    _index: Mapping[Hashable, int] = field(init=False, repr=False, compare=False)

    def __post_init__(self) -> None:
        object.__setattr__(self, '_index', MappingProxyType({state: i for i, state in enumerate(self.states)}))

    def probs_for(self, state: Hashable) -> np.ndarray:
        try:
            return self.dist[self._index[state]]
        except KeyError as exc:
            raise SolverError(f'Politica sem entrada para o estado. estado={state}') from exc
