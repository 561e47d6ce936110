from __future__ import annotations

import logging
from dataclasses import dataclass
from time import perf_counter
from typing import Any, Iterable

from app.application.dtos.planning import TadpConfig, state_payload
from app.domain.entities.approx import KernelBasis
from app.domain.entities.automaton import TaskDfa
from app.domain.entities.decomposition import Decomposition
from app.domain.entities.mdp import LabeledMdp, State
from app.domain.entities.product import ProductMdp
from app.domain.services.adp_solver import TadpResult, build_kernel_basis, tadp_solve
from app.domain.services.decomposition_service import decompose
from app.domain.services.product_service import build_product
from app.infrastructure.monitoring.prometheus import solver_duration_seconds, tadp_epochs_total, tadp_level_duration_seconds
from app.infrastructure.simulation.product_simulator import ProductSimulator

logger = logging.getLogger(__name__)


def obstacle_states(mdp: LabeledMdp, obstacle_prop: str = 'O') -> frozenset[State]:
    return frozenset(s for s in mdp.states if obstacle_prop in mdp.label_of(s))


@dataclass
class TadpSolveResult:
    product: ProductMdp
    decomposition: Decomposition
    basis: KernelBasis
    result: TadpResult
    timings_ms: dict[str, float]

    def initial_value(self) -> dict[str, float]:
        (cell, mode) = self.product.initial
        deamplified = self.result.approx.value(cell, mode)
        return {'raw': deamplified * self.result.approx.alpha, 'deamplified': deamplified}

    def summary(self) -> dict[str, Any]:
        return {
            'solver': 'tadp',
            'epochs': self.result.epochs,
            'wall_time_s': round(self.result.wall_time_s, 6),
            'centers': self.basis.size,
            'sigma': self.basis.sigma,
            'alpha': self.result.approx.alpha,
            'product_states': self.product.size,
            'initial_state': state_payload(self.product.initial),
            'initial_value': self.initial_value(),
            'levels': [report.as_dict() for report in self.result.levels],
        }


class SolveTadpUseCase:
    def __init__(self, config: TadpConfig) -> None:
        self.config = config

    def execute(
        self,
        *,
        mdp: LabeledMdp,
        dfa: TaskDfa,
        product: ProductMdp | None = None,
        decomposition: Decomposition | None = None,
        blocked: Iterable[State] | None = None,
    ) -> TadpSolveResult:
        timings_ms: dict[str, float] = {}
        config = self.config

        started = perf_counter()
        if product is None:
            product = build_product(mdp, dfa, config.gamma, config.tau)
        if decomposition is None:
            decomposition = decompose(mdp, dfa)
        timings_ms['build'] = (perf_counter() - started) * 1000.0

        started = perf_counter()
        basis = build_kernel_basis(
            mdp,
            sigma=config.sigma,
            center_interval=config.center_interval,
            blocked=obstacle_states(mdp) if blocked is None else blocked,
        )
        timings_ms['basis'] = (perf_counter() - started) * 1000.0

        started = perf_counter()
        result = tadp_solve(
            ProductSimulator(product),
            decomposition,
            basis,
            config.to_parameters(dfa.states),
        )
        elapsed = perf_counter() - started
        timings_ms['solve'] = elapsed * 1000.0

        tadp_epochs_total.inc(result.epochs)
        for report in result.levels:
            tadp_level_duration_seconds.observe(report.wall_time_s)
        solver_duration_seconds.labels(solver='tadp').observe(elapsed)
        logger.info('TADP concluido. niveis=%s epocas=%s duracao_s=%.3f', len(result.levels), result.epochs, elapsed)
        return TadpSolveResult(
            product=product,
            decomposition=decomposition,
            basis=basis,
            result=result,
            timings_ms=timings_ms,
        )
