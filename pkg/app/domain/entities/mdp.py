from __future__ import annotations

from dataclasses import dataclass, field
from types import MappingProxyType
from typing import Hashable, Mapping

from app.domain.entities.automaton import AtomicPropositionSet
from app.domain.exceptions import MdpError

State = Hashable
Cell = tuple[int, int]

GRID_ACTIONS: tuple[str, ...] = ('U', 'D', 'L', 'R')
GRID_MOVES: Mapping[str, Cell] = MappingProxyType({'U': (0, 1), 'D': (0, -1), 'L': (-1, 0), 'R': (1, 0)})


@dataclass(frozen=True)
class LabeledMdp:
    states: tuple[State, ...]
    actions: tuple[str, ...]
    initial: State
    transition: Mapping[tuple[State, str], Mapping[State, float]]
    props: AtomicPropositionSet
    label: Mapping[State, AtomicPropositionSet]
    available: Mapping[State, tuple[str, ...]] | None = None
    grid_size: tuple[int, int] | None = None
    _index: Mapping[State, int] = field(init=False, repr=False, compare=False)

    def __post_init__(self) -> None:
        object.__setattr__(self, 'transition', MappingProxyType({key: MappingProxyType(dict(row)) for key, row in self.transition.items()}))
        object.__setattr__(self, 'label', MappingProxyType(dict(self.label)))
        if self.available is not None:
            object.__setattr__(self, 'available', MappingProxyType(dict(self.available)))
        index = {state: position for position, state in enumerate(self.states)}
        if len(index) != len(self.states):
            raise MdpError('Estados duplicados no MDP.')
        object.__setattr__(self, '_index', MappingProxyType(index))
        if self.initial not in index:
            raise MdpError(f'Estado inicial desconhecido. estado={self.initial}')

    def index_of(self, state: State) -> int:
        try:
            return self._index[state]
        except KeyError as exc:
            raise MdpError(f'Estado desconhecido. estado={state}') from exc

    def has_state(self, state: State) -> bool:
        return state in self._index

    def actions_at(self, state: State) -> tuple[str, ...]:
        if self.available is None:
            return self.actions
        return self.available.get(state, ())

    def label_of(self, state: State) -> AtomicPropositionSet:
        return self.label.get(state, AtomicPropositionSet())


@dataclass(frozen=True)
class GridWorldSpec:
    width: int
    height: int
    noise: float = 0.03
    regions: Mapping[str, frozenset[Cell]] = field(default_factory=dict)
    obstacles: frozenset[Cell] = frozenset()
    walls: frozenset[frozenset[Cell]] = frozenset()
    initial_cell: Cell = (0, 0)
    obstacle_prop: str = 'O'

    def __post_init__(self) -> None:
        object.__setattr__(
            self,
            'regions',
            MappingProxyType({str(name): frozenset(tuple(cell) for cell in cells) for name, cells in self.regions.items()}),
        )
        object.__setattr__(self, 'obstacles', frozenset(tuple(cell) for cell in self.obstacles))
        object.__setattr__(self, 'walls', frozenset(frozenset(tuple(cell) for cell in wall) for wall in self.walls))
        object.__setattr__(self, 'initial_cell', tuple(self.initial_cell))

    def cells(self) -> tuple[Cell, ...]:
        return tuple((x, y) for y in range(self.height) for x in range(self.width))

    def contains(self, cell: Cell) -> bool:
        return 0 <= cell[0] < self.width and 0 <= cell[1] < self.height
