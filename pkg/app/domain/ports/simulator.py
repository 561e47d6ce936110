from __future__ import annotations

from typing import Protocol

import numpy as np

from app.domain.entities.product import ProductState


class SimulatorPort(Protocol):
    """Blackbox step oracle over product states.

    Only sampled successors and rewards cross this boundary; transition
    matrices stay behind it.
    """

    @property
    def actions(self) -> tuple[str, ...]:
        ...

    def reset(self, rng: np.random.Generator | None = None) -> ProductState:
        ...

    def actions_at(self, state: ProductState) -> tuple[str, ...]:
        ...

    def step(self, state: ProductState, action: str, rng: np.random.Generator) -> tuple[ProductState, float]:
        ...

    def is_accepting(self, state: ProductState) -> bool:
        ...

    def is_sink(self, state: ProductState) -> bool:
        ...
