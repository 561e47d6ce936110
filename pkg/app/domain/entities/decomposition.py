from __future__ import annotations

from dataclasses import dataclass, field
from types import MappingProxyType
from typing import Hashable, Mapping

from app.domain.entities.automaton import mode_sort_key
from app.domain.entities.mdp import State


@dataclass(frozen=True, slots=True)
class SccResult:
    count: int
    component: Mapping[Hashable, int]
    topo_id: Mapping[Hashable, int]


@dataclass(frozen=True, slots=True)
class LevelRepair:
    meta_mode: int
    from_level: int
    to_level: int


@dataclass(frozen=True)
class Decomposition:
    all_modes: tuple[str, ...]
    modes: tuple[str, ...]
    accepting_modes: frozenset[str]
    meta_modes: tuple[frozenset[str], ...]
    levels: tuple[tuple[int, ...], ...]
    order: tuple[int, ...]
    dropped_modes: frozenset[str]
    dependency_edges: frozenset[tuple[str, str]]
    meta_edges: frozenset[tuple[int, int]]
    guards: Mapping[tuple[str, str], frozenset[State]]
    invariant_sets: Mapping[str, frozenset[State]]
    repairs: tuple[LevelRepair, ...] = ()
    _level_of_meta: Mapping[int, int] = field(init=False, repr=False, compare=False)

    def __post_init__(self) -> None:
        object.__setattr__(self, 'guards', MappingProxyType(dict(self.guards)))
        object.__setattr__(self, 'invariant_sets', MappingProxyType(dict(self.invariant_sets)))
        level_of = {meta: position for position, level in enumerate(self.levels) for meta in level}
        object.__setattr__(self, '_level_of_meta', MappingProxyType(level_of))

    def meta_mode_of(self, mode: str) -> int | None:
        for position, meta in enumerate(self.meta_modes):
            if mode in meta:
                return position
        return None

    def level_of(self, mode: str) -> int | None:
        meta = self.meta_mode_of(mode)
        if meta is None:
            return None
        return self._level_of_meta.get(meta)

    def level_modes(self, level: int) -> tuple[str, ...]:
        modes = [mode for meta in self.levels[level] for mode in self.meta_modes[meta]]
        return tuple(sorted(modes, key=mode_sort_key))

    def constraint_states(self, meta: int) -> frozenset[State]:
        members = self.meta_modes[meta]
        collected: set[State] = set()
        for mode in members:
            collected.update(self.invariant_sets.get(mode, frozenset()))
        for (source, _target), cells in self.guards.items():
            if source in members:
                collected.update(cells)
        return frozenset(collected)

    def as_dict(self) -> dict:
        return {
            'meta_modes': [sorted(meta, key=mode_sort_key) for meta in self.meta_modes],
            'levels': [
                [sorted(self.meta_modes[meta], key=mode_sort_key) for meta in level] for level in self.levels
            ],
            'order': list(self.order),
            'dropped_modes': sorted(self.dropped_modes, key=mode_sort_key),
            'dependency_edges': sorted([list(edge) for edge in self.dependency_edges]),
            'repairs': [
                {'meta_mode': item.meta_mode, 'from_level': item.from_level, 'to_level': item.to_level}
                for item in self.repairs
            ],
        }
