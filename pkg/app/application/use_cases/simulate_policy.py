from __future__ import annotations

import logging
from dataclasses import dataclass
from time import perf_counter

from app.application.dtos.planning import RolloutConfig
from app.domain.entities.product import ProductMdp, ProductState
from app.domain.entities.simulation import RolloutStats, Trajectory
from app.domain.services.simulation_service import PolicyLike, run_trajectories, simulate_policy
from app.infrastructure.monitoring.prometheus import rollouts_total
from app.infrastructure.simulation.product_simulator import ProductSimulator

logger = logging.getLogger(__name__)


@dataclass
class SimulationResult:
    start: ProductState
    stats: RolloutStats
    trajectories: list[Trajectory]
    timings_ms: dict[str, float]


class SimulatePolicyUseCase:
    def __init__(self, config: RolloutConfig) -> None:
        self.config = config

    def execute(
        self,
        *,
        product: ProductMdp,
        policy: PolicyLike,
        start: ProductState | None = None,
        keep_trajectories: int = 0,
    ) -> SimulationResult:
        timings_ms: dict[str, float] = {}
        simulator = ProductSimulator(product)
        origin = start if start is not None else product.initial

        started = perf_counter()
        stats = simulate_policy(simulator, policy, origin, self.config.n_runs, self.config.step_cap, self.config.seed)
        timings_ms['rollouts'] = (perf_counter() - started) * 1000.0
        rollouts_total.labels(result='success').inc(stats.successes)
        rollouts_total.labels(result='sink').inc(stats.failures_sink)
        rollouts_total.labels(result='timeout').inc(stats.failures_timeout)

        trajectories: list[Trajectory] = []
        if keep_trajectories > 0:
            started = perf_counter()
            trajectories = run_trajectories(
                simulator,
                policy,
                origin,
                min(keep_trajectories, max(self.config.n_runs, 1)),
                self.config.step_cap,
                self.config.seed,
            )
            timings_ms['trajectories'] = (perf_counter() - started) * 1000.0
        return SimulationResult(start=origin, stats=stats, trajectories=trajectories, timings_ms=timings_ms)
