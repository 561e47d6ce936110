from __future__ import annotations

import logging
from typing import Hashable, Iterable, Literal, Mapping, Sequence

from app.domain.entities.automaton import TaskDfa, mode_sort_key
from app.domain.entities.decomposition import Decomposition, LevelRepair, SccResult
from app.domain.entities.mdp import LabeledMdp, State
from app.domain.exceptions import DfaError
from app.domain.services.automata_service import coaccessible_modes, coaccessible_trim

logger = logging.getLogger(__name__)

Dependency = Literal['mdp', 'automaton']
Graph = Mapping[Hashable, Iterable[Hashable]]


def _check_mode(dfa: TaskDfa, mode: str) -> None:
    if not dfa.has_mode(mode):
        raise DfaError(f'Modo desconhecido. modo={mode}')


def mode_exit_targets(mdp: LabeledMdp, dfa: TaskDfa, mode: str) -> dict[State, frozenset[str]]:
    """For each MDP state, the modes reachable in one stochastic step from ``mode``."""
    _check_mode(dfa, mode)
    projected = {s: mdp.label_of(s).intersection(dfa.alphabet_props) for s in mdp.states}
    next_mode: dict[State, str | None] = {
        s: dfa.transitions.get((mode, symbol)) for s, symbol in projected.items()
    }
    exits: dict[State, frozenset[str]] = {}
    for s in mdp.states:
        reached: set[str] = set()
        for action in mdp.actions_at(s):
            for s_next, prob in mdp.transition[(s, action)].items():
                if prob > 0 and next_mode[s_next] is not None:
                    reached.add(next_mode[s_next])
        exits[s] = frozenset(reached)
    return exits


def guard_set(mdp: LabeledMdp, dfa: TaskDfa, mode: str, target: str) -> frozenset[State]:
    _check_mode(dfa, target)
    if mode == target:
        raise DfaError(f'Guarda exige modos distintos. modo={mode}')
    exits = mode_exit_targets(mdp, dfa, mode)
    return frozenset(s for s, reached in exits.items() if target in reached)


def invariant_set(mdp: LabeledMdp, dfa: TaskDfa, mode: str) -> frozenset[State]:
    exits = mode_exit_targets(mdp, dfa, mode)
    return frozenset(s for s, reached in exits.items() if reached <= {mode})


def mode_dependency_graph(
    mdp: LabeledMdp | None,
    dfa: TaskDfa,
    *,
    dependency: Dependency = 'mdp',
    modes: Sequence[str] | None = None,
) -> dict[str, tuple[str, ...]]:
    scope = list(dfa.states if modes is None else modes)
    allowed = set(scope)
    graph: dict[str, tuple[str, ...]] = {}
    for mode in scope:
        if dependency == 'automaton':
            targets = set(dfa.successors(mode))
        elif dependency == 'mdp':
            if mdp is None:
                raise DfaError('Dependencia pelo MDP exige um MDP.')
            targets = {t for reached in mode_exit_targets(mdp, dfa, mode).values() for t in reached}
        else:
            raise DfaError(f'Tipo de dependencia desconhecido. dependencia={dependency}')
        targets.discard(mode)
        graph[mode] = tuple(sorted(targets & allowed, key=mode_sort_key))
    return graph


def _nodes(graph: Graph) -> list[Hashable]:
    ordered = list(dict.fromkeys(graph))
    for targets in list(graph.values()):
        for node in targets:
            if node not in graph and node not in ordered:
                ordered.append(node)
    return ordered


def kosaraju_scc(graph: Graph) -> SccResult:
    """Kosaraju's two-pass SCC decomposition.

    ``component`` numbers components in the order the second pass discovers
    them, which is a topological order of the condensation. ``topo_id`` is the
    height of a component in the condensation: sinks get 1, every other
    component gets one more than its highest successor.
    """
    nodes = _nodes(graph)
    forward = {node: list(dict.fromkeys(graph.get(node, ()))) for node in nodes}
    reverse: dict[Hashable, list[Hashable]] = {node: [] for node in nodes}
    for node in nodes:
        for target in forward[node]:
            reverse[target].append(node)

    visited: set[Hashable] = set()
    finish: list[Hashable] = []
    for root in nodes:
        if root in visited:
            continue
        visited.add(root)
        stack = [(root, iter(forward[root]))]
        while stack:
            node, children = stack[-1]
            advanced = False
            for child in children:
                if child not in visited:
                    visited.add(child)
                    stack.append((child, iter(forward[child])))
                    advanced = True
                    break
            if not advanced:
                stack.pop()
                finish.append(node)

    component: dict[Hashable, int] = {}
    count = 0
    for root in reversed(finish):
        if root in component:
            continue
        component[root] = count
        pending = [root]
        while pending:
            node = pending.pop()
            for source in reverse[node]:
                if source not in component:
                    component[source] = count
                    pending.append(source)
        count += 1

    successors: dict[int, set[int]] = {c: set() for c in range(count)}
    for node in nodes:
        for target in forward[node]:
            if component[node] != component[target]:
                successors[component[node]].add(component[target])
    height: dict[int, int] = {}
    for c in reversed(range(count)):
        height[c] = 1 + max((height[s] for s in successors[c]), default=0)

    return SccResult(
        count=count,
        component=component,
        topo_id={node: height[component[node]] for node in nodes},
    )


def level_sets(
    meta_modes: Sequence[frozenset[str]],
    meta_edges: Iterable[tuple[int, int]],
    accepting: Iterable[str],
) -> tuple[tuple[tuple[int, ...], ...], frozenset[int]]:
    accepting = frozenset(accepting)
    edges = set(meta_edges)
    levels: list[tuple[int, ...]] = []
    current = tuple(i for i, meta in enumerate(meta_modes) if meta & accepting)
    leveled: set[int] = set()
    while current:
        levels.append(current)
        leveled.update(current)
        previous = set(current)
        current = tuple(
            i for i in range(len(meta_modes))
            if i not in leveled and any((i, j) in edges for j in previous)
        )
    unleveled = frozenset(range(len(meta_modes))) - leveled
    return tuple(levels), unleveled


def repair_backup_order(
    levels: Sequence[Sequence[int]],
    meta_edges: Iterable[tuple[int, int]],
) -> tuple[tuple[tuple[int, ...], ...], tuple[LevelRepair, ...]]:
    """Raise any meta-mode whose successor sits on a later level up to that level."""
    level_of = {meta: position for position, level in enumerate(levels) for meta in level}
    original = dict(level_of)
    edges = [(i, j) for i, j in meta_edges if i in level_of and j in level_of and i != j]
    changed = True
    while changed:
        changed = False
        for source, target in sorted(edges):
            if level_of[target] > level_of[source]:
                level_of[source] = level_of[target]
                changed = True

    repairs = tuple(
        LevelRepair(meta_mode=meta, from_level=original[meta], to_level=level_of[meta])
        for meta in sorted(level_of)
        if level_of[meta] != original[meta]
    )
    buckets: dict[int, list[int]] = {}
    for meta, position in level_of.items():
        buckets.setdefault(position, []).append(meta)
    rebuilt = tuple(tuple(sorted(buckets[position])) for position in sorted(buckets))
    return rebuilt, repairs


def decompose(
    mdp: LabeledMdp,
    dfa: TaskDfa,
    *,
    dependency: Dependency = 'mdp',
) -> Decomposition:
    trim = coaccessible_trim(dfa)
    live = coaccessible_modes(dfa)
    modes = tuple(mode for mode in dfa.states if mode in live)

    guards: dict[tuple[str, str], frozenset[State]] = {}
    invariants: dict[str, frozenset[State]] = {}
    for mode in modes:
        exits = mode_exit_targets(mdp, dfa, mode)
        invariants[mode] = frozenset(s for s, reached in exits.items() if reached <= {mode})
        for target in dfa.states:
            if target == mode:
                continue
            cells = frozenset(s for s, reached in exits.items() if target in reached)
            if cells:
                guards[(mode, target)] = cells

    if dependency == 'mdp':
        graph = {
            mode: tuple(sorted((t for (source, t) in guards if source == mode and t in live), key=mode_sort_key))
            for mode in modes
        }
    else:
        graph = mode_dependency_graph(mdp, dfa, dependency=dependency, modes=modes)
    dependency_edges = frozenset((mode, target) for mode, targets in graph.items() for target in targets)

    scc = kosaraju_scc(graph)
    grouped: dict[int, set[str]] = {}
    for mode in modes:
        grouped.setdefault(scc.component[mode], set()).add(mode)
    meta_modes = tuple(
        sorted((frozenset(group) for group in grouped.values()), key=lambda meta: mode_sort_key(min(meta, key=mode_sort_key)))
    )
    meta_of = {mode: i for i, meta in enumerate(meta_modes) for mode in meta}
    meta_edges = frozenset(
        (meta_of[source], meta_of[target]) for source, target in dependency_edges if meta_of[source] != meta_of[target]
    )

    levels, unleveled = level_sets(meta_modes, meta_edges, dfa.accepting)
    levels, repairs = repair_backup_order(levels, meta_edges)
    for item in repairs:
        logger.warning(
            'Ordem de backup reparada. meta_modo=%s nivel_antes=%s nivel_depois=%s',
            sorted(meta_modes[item.meta_mode], key=mode_sort_key),
            item.from_level,
            item.to_level,
        )

    dropped = frozenset(trim.removed) | frozenset(mode for meta in unleveled for mode in meta_modes[meta])
    if unleveled:
        logger.warning(
            'Meta-modos sem nivel descartados. modos=%s',
            sorted((mode for meta in unleveled for mode in meta_modes[meta]), key=mode_sort_key),
        )

    decomposition = Decomposition(
        all_modes=dfa.states,
        modes=modes,
        accepting_modes=frozenset(dfa.accepting),
        meta_modes=meta_modes,
        levels=levels,
        order=tuple(meta for level in levels for meta in level),
        dropped_modes=dropped,
        dependency_edges=dependency_edges,
        meta_edges=meta_edges,
        guards=guards,
        invariant_sets=invariants,
        repairs=repairs,
    )
    logger.info(
        'Decomposicao concluida. meta_modos=%s niveis=%s descartados=%s',
        len(meta_modes),
        len(levels),
        sorted(dropped, key=mode_sort_key),
    )
    return decomposition
