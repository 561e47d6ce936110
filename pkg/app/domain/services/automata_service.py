from __future__ import annotations

import logging
from collections import deque
from dataclasses import dataclass
from typing import Iterable, Sequence

from app.domain.entities.automaton import AtomicPropositionSet, TaskDfa, mode_sort_key
from app.domain.exceptions import DfaError, DfaValidationError, UnsatisfiableTaskError
from app.domain.services.guard_expressions import Guard, evaluate_guard, guard_props, parse_guard

logger = logging.getLogger(__name__)

DEAD_MODE = '__dead__'


@dataclass(frozen=True, slots=True)
class GuardRule:
    source: str
    guard: Guard
    target: str
    line: int | None = None


@dataclass(frozen=True)
class TrimResult:
    dfa: TaskDfa
    removed: frozenset[str]
    dangling: tuple[tuple[str, AtomicPropositionSet, str], ...] = ()


def rule(source: str, guard: str, target: str, line: int | None = None) -> GuardRule:
    return GuardRule(source=source, guard=parse_guard(guard, line), target=target, line=line)


def build_dfa(
    *,
    props: Iterable[str],
    states: Sequence[str],
    initial: str,
    accepting: Iterable[str],
    rules: Sequence[GuardRule],
    default_self_loop: bool = False,
) -> TaskDfa:
    alphabet = AtomicPropositionSet.of(props)
    known_states = set(states)
    for item in rules:
        if item.source not in known_states or item.target not in known_states:
            raise DfaValidationError(f'Regra com modo desconhecido. linha={item.line} origem={item.source} destino={item.target}')
        unknown = guard_props(item.guard) - set(alphabet.props)
        if unknown:
            raise DfaValidationError(f'Proposicao desconhecida na guarda. linha={item.line} proposicoes={sorted(unknown)}')

    by_source: dict[str, list[GuardRule]] = {state: [] for state in states}
    for item in rules:
        by_source[item.source].append(item)

    transitions: dict[tuple[str, AtomicPropositionSet], str] = {}
    for mode in states:
        for symbol in alphabet.subsets():
            targets = {item.target: item for item in by_source[mode] if evaluate_guard(item.guard, symbol)}
            if len(targets) > 1:
                lines = sorted(str(item.line) for item in targets.values())
                raise DfaValidationError(
                    f'Guardas sobrepostas (nao deterministico). modo={mode} simbolo={symbol} linhas={",".join(lines)}'
                )
            if targets:
                transitions[(mode, symbol)] = next(iter(targets))
            elif default_self_loop:
                transitions[(mode, symbol)] = mode
            else:
                raise DfaValidationError(f'Funcao de transicao nao total. modo={mode} simbolo={symbol}')

    return TaskDfa(
        states=tuple(states),
        alphabet_props=alphabet,
        transitions=transitions,
        initial=initial,
        accepting=frozenset(accepting),
    )


def step(dfa: TaskDfa, mode: str, symbol: AtomicPropositionSet) -> str:
    if not dfa.has_mode(mode):
        raise DfaError(f'Modo desconhecido. modo={mode}')
    if not symbol.issubset(dfa.alphabet_props):
        unknown = sorted(set(symbol.props) - set(dfa.alphabet_props.props))
        raise DfaError(f'Proposicao desconhecida. proposicoes={unknown}')
    try:
        return dfa.transitions[(mode, symbol)]
    except KeyError as exc:
        raise DfaError(f'Transicao indefinida no automato parcial. modo={mode} simbolo={symbol}') from exc


def run_word(dfa: TaskDfa, word: Sequence[AtomicPropositionSet], start: str | None = None) -> tuple[str, bool]:
    mode = dfa.initial if start is None else start
    accepted = mode in dfa.accepting
    for symbol in word:
        mode = step(dfa, mode, symbol)
        accepted = accepted or mode in dfa.accepting
    return mode, accepted


def coaccessible_modes(dfa: TaskDfa) -> frozenset[str]:
    predecessors: dict[str, set[str]] = {mode: set() for mode in dfa.states}
    for (source, _), target in dfa.transitions.items():
        predecessors[target].add(source)

    reached = set(dfa.accepting)
    queue = deque(sorted(dfa.accepting, key=mode_sort_key))
    while queue:
        mode = queue.popleft()
        for previous in sorted(predecessors[mode], key=mode_sort_key):
            if previous not in reached:
                reached.add(previous)
                queue.append(previous)
    return frozenset(reached)


def coaccessible_trim(dfa: TaskDfa, *, preserve_totality: bool = False) -> TrimResult:
    keep = coaccessible_modes(dfa)
    if dfa.initial not in keep:
        raise UnsatisfiableTaskError(f'Modo inicial nao alcanca o conjunto de aceitacao. modo={dfa.initial}')

    removed = frozenset(dfa.states) - keep
    if preserve_totality:
        # a sink added by an earlier trim is kept
        removed -= {DEAD_MODE}
    if not removed:
        return TrimResult(dfa=dfa, removed=frozenset())

    surviving = [mode for mode in dfa.states if mode in keep]
    transitions: dict[tuple[str, AtomicPropositionSet], str] = {}
    dangling: list[tuple[str, AtomicPropositionSet, str]] = []
    for (source, symbol), target in dfa.transitions.items():
        if source not in keep:
            continue
        if target in keep:
            transitions[(source, symbol)] = target
        elif preserve_totality:
            transitions[(source, symbol)] = DEAD_MODE
        else:
            dangling.append((source, symbol, target))

    if preserve_totality:
        surviving.append(DEAD_MODE)
        for symbol in dfa.alphabet_props.subsets():
            transitions[(DEAD_MODE, symbol)] = DEAD_MODE

    logger.info(
        'Automato podado por coacessibilidade. removidos=%s pendentes=%s',
        sorted(removed, key=mode_sort_key),
        len(dangling),
    )
    trimmed = TaskDfa(
        states=tuple(surviving),
        alphabet_props=dfa.alphabet_props,
        transitions=transitions,
        initial=dfa.initial,
        accepting=dfa.accepting,
        partial=bool(dangling),
    )
    dangling.sort(key=lambda item: (mode_sort_key(item[0]), item[1].props, mode_sort_key(item[2])))
    return TrimResult(dfa=trimmed, removed=removed, dangling=tuple(dangling))
