from __future__ import annotations

import logging
from dataclasses import asdict, dataclass
from time import perf_counter
from typing import Any, Sequence

from app.application.dtos.planning import ExactSolverConfig, RolloutConfig, TadpConfig
from app.application.use_cases.simulate_policy import SimulatePolicyUseCase
from app.application.use_cases.solve_exact import SolveExactUseCase
from app.application.use_cases.solve_tadp import SolveTadpUseCase
from app.domain.entities.automaton import TaskDfa
from app.domain.entities.mdp import LabeledMdp
from app.domain.entities.product import ProductState
from app.domain.exceptions import ConfigError, DomainError
from app.domain.services.decomposition_service import decompose
from app.domain.services.product_service import build_product

logger = logging.getLogger(__name__)

KNOWN_SOLVERS = ('vi', 'tvi', 'tadp')


@dataclass
class BenchRow:
    solver: str
    wall_time_s: float | None = None
    backups: int | None = None
    epochs: int | None = None
    success_rate: float | None = None
    n_runs: int = 0
    error: str | None = None

    def as_dict(self) -> dict[str, Any]:
        return asdict(self)


@dataclass
class BenchResult:
    rows: list[BenchRow]
    timings_ms: dict[str, float]

    def reduction(self, metric: str = 'backups') -> float | None:
        """Relative reduction of TVI over VI for ``metric``."""
        by_solver = {row.solver: row for row in self.rows if row.error is None}
        if 'vi' not in by_solver or 'tvi' not in by_solver:
            return None
        base = getattr(by_solver['vi'], metric)
        if not base:
            return None
        return 1.0 - getattr(by_solver['tvi'], metric) / base


class RunBenchUseCase:
    def __init__(
        self,
        exact: ExactSolverConfig,
        tadp: TadpConfig | None = None,
        rollout: RolloutConfig | None = None,
    ) -> None:
        self.exact = exact
        self.tadp = tadp or TadpConfig.default()
        self.rollout = rollout

    def execute(
        self,
        *,
        mdp: LabeledMdp,
        dfa: TaskDfa,
        solvers: Sequence[str],
        start: ProductState | None = None,
    ) -> BenchResult:
        unknown = [name for name in solvers if name not in KNOWN_SOLVERS]
        if unknown:
            raise ConfigError(f'Solvers desconhecidos no benchmark. solvers={unknown}')
        timings_ms: dict[str, float] = {}
        rows: list[BenchRow] = []
        if not solvers:
            return BenchResult(rows=rows, timings_ms=timings_ms)

        started = perf_counter()
        product = build_product(mdp, dfa, self.exact.gamma, self.exact.tau)
        decomposition = decompose(mdp, dfa)
        timings_ms['build'] = (perf_counter() - started) * 1000.0

        for name in solvers:
            row = BenchRow(solver=name)
            started = perf_counter()
            try:
                if name == 'tadp':
                    tadp_product = build_product(mdp, dfa, self.tadp.gamma, self.tadp.tau)
                    solved = SolveTadpUseCase(self.tadp).execute(
                        mdp=mdp,
                        dfa=dfa,
                        product=tadp_product,
                        decomposition=decomposition,
                    )
                    row.wall_time_s = solved.result.wall_time_s
                    row.epochs = solved.result.epochs
                    policy = solved.result.policy
                    rollout_product = tadp_product
                else:
                    exact = SolveExactUseCase(self.exact).execute(solver=name, product=product, decomposition=decomposition)
                    row.wall_time_s = exact.table.wall_time_s
                    row.backups = exact.table.backup_count
                    policy = exact.policy
                    rollout_product = product

                if self.rollout is not None and self.rollout.n_runs > 0:
                    simulated = SimulatePolicyUseCase(self.rollout).execute(
                        product=rollout_product,
                        policy=policy,
                        start=start,
                    )
                    row.success_rate = simulated.stats.success_rate
                    row.n_runs = simulated.stats.n_runs
            except DomainError as exc:
                row.error = f'{exc.__class__.__name__}: {exc}'
                logger.warning('Falha de solver no benchmark. solver=%s motivo=%s', name, exc)
            timings_ms[name] = (perf_counter() - started) * 1000.0
            rows.append(row)
            logger.info(
                'Linha de benchmark registrada. solver=%s tempo_s=%s backups=%s epocas=%s erro=%s',
                row.solver,
                row.wall_time_s,
                row.backups,
                row.epochs,
                row.error,
            )
        return BenchResult(rows=rows, timings_ms=timings_ms)
