from __future__ import annotations

import logging

import numpy as np

from app.domain.entities.product import ProductMdp, ProductState
from app.domain.exceptions import SimulationError

logger = logging.getLogger(__name__)


class ProductSimulator:
    """Step oracle over a product MDP.

    Next states are drawn by inverse CDF over the sparse row of the chosen
    action. Solvers only see what ``SimulatorPort`` exposes.
    """

    def __init__(self, product: ProductMdp) -> None:
        self._product = product
        self._cdfs: dict[tuple[int, int], np.ndarray] = {}
        self.step_count = 0

    @property
    def product(self) -> ProductMdp:
        return self._product

    @property
    def actions(self) -> tuple[str, ...]:
        return self._product.actions

    def reset(self, rng: np.random.Generator | None = None) -> ProductState:
        return self._product.initial

    def actions_at(self, state: ProductState) -> tuple[str, ...]:
        i = self._index(state)
        return tuple(self._product.actions[int(a)] for a in self._product.row_actions[i])

    def step(self, state: ProductState, action: str, rng: np.random.Generator) -> tuple[ProductState, float]:
        i = self._index(state)
        try:
            a_idx = self._product.action_index(action)
            targets, probs = self._product.successors(i, a_idx)
        except Exception as exc:
            raise SimulationError(f'Acao invalida no simulador. estado={state} acao={action}') from exc

        key = (i, a_idx)
        cdf = self._cdfs.get(key)
        if cdf is None:
            cdf = np.cumsum(probs)
            self._cdfs[key] = cdf
        position = int(np.searchsorted(cdf, rng.random() * cdf[-1], side='right'))
        position = min(position, cdf.size - 1)
        self.step_count += 1
        return self._product.states[int(targets[position])], float(self._product.reward[i, a_idx])

    def is_accepting(self, state: ProductState) -> bool:
        return self._index(state) in self._product.accepting

    def is_sink(self, state: ProductState) -> bool:
        i = self._index(state)
        if i in self._product.accepting:
            return False
        return i in self._product.dead or self._product.is_absorbing(i)

    def _index(self, state: ProductState) -> int:
        try:
            return self._product.index_of(state)
        except Exception as exc:
            raise SimulationError(f'Estado fora do simulador. estado={state}') from exc
