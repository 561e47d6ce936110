from __future__ import annotations

import logging
from dataclasses import dataclass
from time import perf_counter
from typing import Any, Literal

from app.application.dtos.planning import ExactSolverConfig, state_payload
from app.domain.entities.automaton import TaskDfa
from app.domain.entities.decomposition import Decomposition
from app.domain.entities.mdp import LabeledMdp
from app.domain.entities.product import ProductMdp
from app.domain.entities.values import SoftPolicy, ValueTable
from app.domain.exceptions import SolverError
from app.domain.services.decomposition_service import decompose
from app.domain.services.exact_solver import extract_policy, topological_value_iteration, value_iteration
from app.domain.services.product_service import build_product
from app.infrastructure.monitoring.prometheus import bellman_backups_total, solver_duration_seconds

logger = logging.getLogger(__name__)

ExactSolver = Literal['vi', 'tvi']


@dataclass
class ExactSolveResult:
    solver: ExactSolver
    product: ProductMdp
    decomposition: Decomposition
    table: ValueTable
    policy: SoftPolicy
    timings_ms: dict[str, float]

    def initial_value(self) -> dict[str, float]:
        raw = float(self.table.values[self.product.index_of(self.product.initial)])
        return {'raw': raw, 'deamplified': raw / self.table.alpha}

    def summary(self) -> dict[str, Any]:
        summary = self.table.summary()
        summary.update(
            {
                'solver': self.solver,
                'product_states': self.product.size,
                'initial_state': state_payload(self.product.initial),
                'initial_value': self.initial_value(),
                'alpha': self.table.alpha,
            }
        )
        return summary


class SolveExactUseCase:
    def __init__(self, config: ExactSolverConfig) -> None:
        self.config = config

    def build(
        self,
        *,
        mdp: LabeledMdp,
        dfa: TaskDfa,
        prune_unreachable: bool = False,
    ) -> tuple[ProductMdp, Decomposition]:
        product = build_product(mdp, dfa, self.config.gamma, self.config.tau, prune_unreachable=prune_unreachable)
        return product, decompose(mdp, dfa)

    def execute(
        self,
        *,
        solver: ExactSolver,
        mdp: LabeledMdp | None = None,
        dfa: TaskDfa | None = None,
        product: ProductMdp | None = None,
        decomposition: Decomposition | None = None,
        prune_unreachable: bool = False,
    ) -> ExactSolveResult:
        if solver not in ('vi', 'tvi'):
            raise SolverError(f'Solver exato desconhecido. solver={solver}')
        timings_ms: dict[str, float] = {}
        config = self.config

        started = perf_counter()
        if product is None or decomposition is None:
            if mdp is None or dfa is None:
                raise SolverError('Informe MDP e automato ou produto e decomposicao.')
            product, decomposition = self.build(mdp=mdp, dfa=dfa, prune_unreachable=prune_unreachable)
        timings_ms['build'] = (perf_counter() - started) * 1000.0

        options = {
            'operator': config.operator,
            'sense': config.sense,
            'epsilon': config.epsilon,
            'alpha': config.alpha,
            'convention': config.convention,
            'stop_rule': config.stop_rule,
            'max_sweeps': config.max_sweeps,
        }
        started = perf_counter()
        if solver == 'vi':
            table = value_iteration(product, dropped_modes=decomposition.dropped_modes, **options)
        else:
            table = topological_value_iteration(product, decomposition, **options)
        elapsed = perf_counter() - started
        timings_ms['solve'] = elapsed * 1000.0
        bellman_backups_total.labels(solver=solver).inc(table.backup_count)
        solver_duration_seconds.labels(solver=solver).observe(elapsed)

        started = perf_counter()
        policy = extract_policy(
            product,
            table,
            operator=config.operator,
            sense=config.sense,
            alpha=config.alpha,
            convention=config.convention,
        )
        timings_ms['policy'] = (perf_counter() - started) * 1000.0

        logger.info(
            'Solver exato concluido. solver=%s estados=%s backups=%s duracao_s=%.3f',
            solver,
            product.size,
            table.backup_count,
            elapsed,
        )
        return ExactSolveResult(
            solver=solver,
            product=product,
            decomposition=decomposition,
            table=table,
            policy=policy,
            timings_ms=timings_ms,
        )
