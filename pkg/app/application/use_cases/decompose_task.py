from __future__ import annotations

import logging
from dataclasses import dataclass
from time import perf_counter
from typing import Any

from app.domain.entities.automaton import TaskDfa, mode_sort_key
from app.domain.entities.decomposition import Decomposition
from app.domain.entities.mdp import LabeledMdp
from app.domain.services.decomposition_service import Dependency, decompose, kosaraju_scc

logger = logging.getLogger(__name__)


@dataclass
class DecomposeResult:
    decomposition: Decomposition
    payload: dict[str, Any]
    timings_ms: dict[str, float]


def decomposition_payload(decomposition: Decomposition) -> dict[str, Any]:
    payload = decomposition.as_dict()
    payload['meta_edges'] = [list(edge) for edge in sorted(decomposition.meta_edges)]
    graph = {mode: [] for mode in decomposition.modes}
    for source, target in decomposition.dependency_edges:
        graph[source].append(target)
    topo = kosaraju_scc(graph).topo_id
    payload['topo_id'] = {mode: topo[mode] for mode in sorted(topo, key=mode_sort_key)}
    payload['constraint_state_counts'] = {
        index: len(decomposition.constraint_states(index)) for index in range(len(decomposition.meta_modes))
    }
    return payload


class DecomposeTaskUseCase:
    def execute(self, *, mdp: LabeledMdp, dfa: TaskDfa, dependency: Dependency = 'mdp') -> DecomposeResult:
        timings_ms: dict[str, float] = {}
        started = perf_counter()
        decomposition = decompose(mdp, dfa, dependency=dependency)
        timings_ms['decompose'] = (perf_counter() - started) * 1000.0

        started = perf_counter()
        payload = decomposition_payload(decomposition)
        timings_ms['payload'] = (perf_counter() - started) * 1000.0
        return DecomposeResult(decomposition=decomposition, payload=payload, timings_ms=timings_ms)
