from __future__ import annotations

import re
from dataclasses import dataclass, field
from itertools import combinations
from types import MappingProxyType
from typing import Iterable, Iterator, Mapping

from app.domain.exceptions import DfaError, DfaValidationError

_DIGITS_RE = re.compile(r'(\d+)')


def mode_sort_key(mode: str) -> tuple:
    parts = _DIGITS_RE.split(mode)
    return tuple((0, int(part)) if part.isdigit() else (1, part) for part in parts)


@dataclass(frozen=True, slots=True)
class AtomicPropositionSet:
    props: tuple[str, ...] = ()

    def __post_init__(self) -> None:
        cleaned = tuple(sorted({str(item).strip() for item in self.props}))
        if any(not item for item in cleaned):
            raise DfaError('Proposicao atomica vazia.')
        object.__setattr__(self, 'props', cleaned)

    @classmethod
    def of(cls, items: Iterable[str] = ()) -> AtomicPropositionSet:
        return cls(tuple(items))

    def __iter__(self) -> Iterator[str]:
        return iter(self.props)

    def __len__(self) -> int:
        return len(self.props)

    def __contains__(self, item: object) -> bool:
        return item in self.props

    def issubset(self, other: AtomicPropositionSet) -> bool:
        return set(self.props).issubset(other.props)

    def intersection(self, other: AtomicPropositionSet) -> AtomicPropositionSet:
        return AtomicPropositionSet(tuple(item for item in self.props if item in other.props))

    def subsets(self) -> Iterator[AtomicPropositionSet]:
        for size in range(len(self.props) + 1):
            for combo in combinations(self.props, size):
                yield AtomicPropositionSet(combo)

    def __str__(self) -> str:
        return '{' + ','.join(self.props) + '}'


@dataclass(frozen=True)
class TaskDfa:
    states: tuple[str, ...]
    alphabet_props: AtomicPropositionSet
    transitions: Mapping[tuple[str, AtomicPropositionSet], str]
    initial: str
    accepting: frozenset[str]
    partial: bool = False
    _state_set: frozenset[str] = field(init=False, repr=False, compare=False)

    def __post_init__(self) -> None:
        ordered = tuple(sorted(dict.fromkeys(self.states), key=mode_sort_key))
        object.__setattr__(self, 'states', ordered)
        object.__setattr__(self, '_state_set', frozenset(ordered))
        object.__setattr__(self, 'accepting', frozenset(self.accepting))
        object.__setattr__(self, 'transitions', MappingProxyType(dict(self.transitions)))

        if self.initial not in self._state_set:
            raise DfaValidationError(f'Estado inicial desconhecido. estado={self.initial}')
        if not self.accepting:
            raise DfaValidationError('Conjunto de estados de aceitacao vazio.')
        unknown = self.accepting - self._state_set
        if unknown:
            raise DfaValidationError(f'Estados de aceitacao desconhecidos. estados={sorted(unknown)}')

        for (mode, symbol), target in self.transitions.items():
            if mode not in self._state_set or target not in self._state_set:
                raise DfaValidationError(f'Transicao com modo desconhecido. origem={mode} destino={target}')
            if not symbol.issubset(self.alphabet_props):
                raise DfaValidationError(f'Simbolo fora do alfabeto. simbolo={symbol}')

        if not self.partial:
            for mode in self.states:
                for symbol in self.alphabet_props.subsets():
                    if (mode, symbol) not in self.transitions:
                        raise DfaValidationError(f'Funcao de transicao nao total. modo={mode} simbolo={symbol}')

    def has_mode(self, mode: str) -> bool:
        return mode in self._state_set

    def symbols(self) -> Iterator[AtomicPropositionSet]:
        return self.alphabet_props.subsets()

    def successors(self, mode: str) -> tuple[str, ...]:
        targets = {
            target for (source, _), target in self.transitions.items() if source == mode and target != mode
        }
        return tuple(sorted(targets, key=mode_sort_key))
