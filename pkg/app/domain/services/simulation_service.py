from __future__ import annotations

import logging
from typing import Collection, Protocol

import numpy as np

from app.domain.entities.product import ProductState
from app.domain.entities.simulation import RolloutStats, TerminationReason, Trajectory, TrajectoryStep
from app.domain.exceptions import SimulationError
from app.domain.ports.simulator import SimulatorPort

logger = logging.getLogger(__name__)


class PolicyLike(Protocol):
    actions: tuple[str, ...]

    def probs_for(self, state: ProductState) -> np.ndarray:
        ...


def as_rng(rng: np.random.Generator | int | None) -> np.random.Generator:
    if isinstance(rng, np.random.Generator):
        return rng
    return np.random.default_rng(rng)


def choose_action(policy: PolicyLike, state: ProductState, rng: np.random.Generator) -> str:
    probs = np.asarray(policy.probs_for(state), dtype=float)
    total = probs.sum()
    if not np.isfinite(total) or total <= 0:
        raise SimulationError(f'Distribuicao de acoes invalida. estado={state}')
    position = int(rng.choice(probs.size, p=probs / total))
    return policy.actions[position]


def sample_trajectory(
    simulator: SimulatorPort,
    policy: PolicyLike,
    start: ProductState,
    max_len: int,
    rng: np.random.Generator | int | None = None,
    *,
    keep_modes: Collection[str] | None = None,
) -> Trajectory:
    """Roll ``policy`` from ``start``.

    Stops on reaching an accepting state, on absorption in a sink, after
    ``max_len`` steps, or (when ``keep_modes`` is given) when the mode leaves
    ``keep_modes``. The state that ends the run is not recorded as a step.
    """
    if max_len < 0:
        raise SimulationError(f'Comprimento maximo negativo. max_len={max_len}')
    generator = as_rng(rng)
    state = start
    steps: list[TrajectoryStep] = []
    reason: TerminationReason
    if simulator.is_accepting(state):
        return Trajectory(start=start, steps=(), final=state, terminated='accepting')

    while True:
        if len(steps) >= max_len:
            reason = 'length-cap'
            break
        action = choose_action(policy, state, generator)
        try:
            next_state, reward = simulator.step(state, action, generator)
        except SimulationError:
            raise
        except Exception as exc:
            raise SimulationError(f'Falha no simulador. estado={state} acao={action}') from exc
        steps.append(TrajectoryStep(state=state, action=action, reward=float(reward)))
        state = next_state
        if simulator.is_accepting(state):
            reason = 'accepting'
            break
        if keep_modes is not None and state[1] not in keep_modes:
            reason = 'level-exit'
            break
        if simulator.is_sink(state):
            reason = 'sink'
            break

    return Trajectory(start=start, steps=tuple(steps), final=state, terminated=reason)


def rollout_rng(seed: int, run_index: int) -> np.random.Generator:
    return np.random.default_rng(np.random.SeedSequence([seed, run_index]))


def simulate_policy(
    simulator: SimulatorPort,
    policy: PolicyLike,
    start: ProductState,
    n_runs: int,
    step_cap: int,
    seed: int = 0,
) -> RolloutStats:
    if step_cap < 1:
        raise SimulationError(f'Limite de passos deve ser positivo. step_cap={step_cap}')
    if n_runs < 0:
        raise SimulationError(f'Numero de execucoes negativo. n_runs={n_runs}')

    successes = 0
    sinks = 0
    timeouts = 0
    success_steps: list[int] = []
    for run in range(n_runs):
        trajectory = sample_trajectory(simulator, policy, start, step_cap, rollout_rng(seed, run))
        if trajectory.terminated == 'accepting':
            successes += 1
            success_steps.append(len(trajectory))
        elif trajectory.terminated == 'sink':
            sinks += 1
        else:
            timeouts += 1

    stats = RolloutStats(
        n_runs=n_runs,
        successes=successes,
        failures_sink=sinks,
        failures_timeout=timeouts,
        success_steps=tuple(success_steps),
    )
    logger.info(
        'Simulacao concluida. execucoes=%s sucesso=%.4f sumidouro=%s tempo_esgotado=%s',
        n_runs,
        stats.success_rate,
        sinks,
        timeouts,
    )
    return stats


def run_trajectories(
    simulator: SimulatorPort,
    policy: PolicyLike,
    start: ProductState,
    n_runs: int,
    step_cap: int,
    seed: int = 0,
) -> list[Trajectory]:
    return [sample_trajectory(simulator, policy, start, step_cap, rollout_rng(seed, run)) for run in range(n_runs)]
