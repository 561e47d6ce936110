from __future__ import annotations

from dataclasses import dataclass, field
from types import MappingProxyType
from typing import Mapping

import numpy as np

from app.domain.entities.automaton import TaskDfa
from app.domain.entities.mdp import LabeledMdp, State
from app.domain.exceptions import ProductError

ProductState = tuple[State, str]


@dataclass(frozen=True)
class ProductMdp:
    """Synchronous product of a labeled MDP and a task DFA.

    Rows are stored per state as one concatenated successor list: the
    successors of the k-th available action are
    ``row_targets[i][row_starts[i][k]:row_starts[i][k + 1]]``.
    """

    mdp: LabeledMdp
    dfa: TaskDfa
    states: tuple[ProductState, ...]
    actions: tuple[str, ...]
    initial: ProductState
    accepting: frozenset[int]
    dead: frozenset[int]
    row_actions: tuple[np.ndarray, ...]
    row_starts: tuple[np.ndarray, ...]
    row_targets: tuple[np.ndarray, ...]
    row_probs: tuple[np.ndarray, ...]
    reward: np.ndarray
    gamma: float
    tau: float
    _index: Mapping[ProductState, int] = field(init=False, repr=False, compare=False)

    def __post_init__(self) -> None:
        object.__setattr__(self, '_index', MappingProxyType({state: i for i, state in enumerate(self.states)}))
        self.reward.setflags(write=False)

    @property
    def size(self) -> int:
        return len(self.states)

    @property
    def modes(self) -> tuple[str, ...]:
        return self.dfa.states

    def index_of(self, state: ProductState) -> int:
        try:
            return self._index[state]
        except KeyError as exc:
            raise ProductError(f'Estado do produto desconhecido. estado={state}') from exc

    def has_state(self, state: ProductState) -> bool:
        return state in self._index

    def action_index(self, action: str) -> int:
        try:
            return self.actions.index(action)
        except ValueError as exc:
            raise ProductError(f'Acao desconhecida. acao={action}') from exc

    def successors(self, state_index: int, action_index: int) -> tuple[np.ndarray, np.ndarray]:
        available = self.row_actions[state_index]
        positions = np.flatnonzero(available == action_index)
        if positions.size == 0:
            raise ProductError(f'Acao indisponivel. estado={self.states[state_index]} acao={self.actions[action_index]}')
        k = int(positions[0])
        starts = self.row_starts[state_index]
        stop = starts[k + 1] if k + 1 < starts.size else self.row_targets[state_index].size
        return self.row_targets[state_index][starts[k]:stop], self.row_probs[state_index][starts[k]:stop]

    def is_absorbing(self, state_index: int) -> bool:
        targets = self.row_targets[state_index]
        return bool(np.all(targets == state_index))

    def indices_of_mode(self, mode: str) -> np.ndarray:
        return np.array([i for i, (_, q) in enumerate(self.states) if q == mode], dtype=np.int64)
