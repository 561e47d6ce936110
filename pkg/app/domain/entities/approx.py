from __future__ import annotations

from dataclasses import dataclass, field, replace
from types import MappingProxyType
from typing import Mapping

import numpy as np

from app.domain.entities.mdp import State
from app.domain.exceptions import SolverError


@dataclass(frozen=True)
class KernelBasis:
    states: tuple[State, ...]
    centers: tuple[State, ...]
    sigma: float
    distances: np.ndarray
    features: np.ndarray
    _index: Mapping[State, int] = field(init=False, repr=False, compare=False)

    def __post_init__(self) -> None:
        if self.sigma <= 0:
            raise SolverError('Largura do kernel deve ser positiva.')
        if not self.centers:
            raise SolverError('Base de kernels sem centros.')
        object.__setattr__(self, '_index', MappingProxyType({state: i for i, state in enumerate(self.states)}))
        self.features.setflags(write=False)

    @property
    def size(self) -> int:
        return len(self.centers)

    def index_of(self, state: State) -> int:
        try:
            return self._index[state]
        except KeyError as exc:
            raise SolverError(f'Estado fora da base de kernels. estado={state}') from exc

    def feature(self, state: State) -> np.ndarray:
        return self.features[self.index_of(state)]


@dataclass
class ValueApprox:
    basis: Mapping[str, KernelBasis]
    alpha: float
    theta: dict[str, np.ndarray] = field(default_factory=dict)
    pinned: dict[str, float] = field(default_factory=dict)

    def value(self, state: State, mode: str) -> float:
        """De-amplified value of a product state."""
        if mode in self.pinned:
            return float(self.pinned[mode])
        if mode not in self.theta:
            raise SolverError(f'Modo sem pesos aprendidos. modo={mode}')
        basis = self.basis[mode]
        return float(basis.feature(state) @ self.theta[mode])

    def scaled_value(self, state: State, mode: str) -> float:
        return self.alpha * self.value(state, mode)

    def mode_values(self, mode: str) -> np.ndarray:
        basis = self.basis[mode]
        if mode in self.pinned:
            return np.full(len(basis.states), float(self.pinned[mode]))
        return basis.features @ self.theta[mode]


@dataclass(frozen=True, slots=True)
class LagrangianState:
    lam: float = 0.0
    nu: float = 2.0
    b: float = 1.5
    eta: float = 0.1
    alpha: float = 60.0
    epsilon: float = 1e-3
    nu_max: float = 1e3
    inner: int = 0
    outer: int = 0

    def advance_inner(self) -> LagrangianState:
        return replace(self, inner=self.inner + 1)
