from __future__ import annotations

from dataclasses import dataclass, field
from typing import Literal

import numpy as np

from app.domain.entities.product import ProductState

TerminationReason = Literal['accepting', 'sink', 'length-cap', 'level-exit']


@dataclass(frozen=True, slots=True)
class TrajectoryStep:
    state: ProductState
    action: str
    reward: float


@dataclass(frozen=True)
class Trajectory:
    start: ProductState
    steps: tuple[TrajectoryStep, ...]
    final: ProductState
    terminated: TerminationReason

    def __len__(self) -> int:
        return len(self.steps)


@dataclass(frozen=True)
class RolloutStats:
    n_runs: int
    successes: int
    failures_sink: int
    failures_timeout: int
    success_steps: tuple[int, ...] = field(default=())

    @property
    def success_rate(self) -> float:
        if self.n_runs == 0:
            return 0.0
        return self.successes / self.n_runs

    def steps_summary(self) -> dict[str, float | None]:
        if not self.success_steps:
            return {'mean': None, 'median': None, 'std': None, 'min': None, 'max': None}
        steps = np.asarray(self.success_steps, dtype=float)
        return {
            'mean': float(steps.mean()),
            'median': float(np.median(steps)),
            'std': float(steps.std()),
            'min': float(steps.min()),
            'max': float(steps.max()),
        }

    def as_dict(self) -> dict:
        return {
            'n_runs': self.n_runs,
            'successes': self.successes,
            'failures_sink': self.failures_sink,
            'failures_timeout': self.failures_timeout,
            'success_rate': round(self.success_rate, 6),
            'steps_to_goal': self.steps_summary(),
        }
