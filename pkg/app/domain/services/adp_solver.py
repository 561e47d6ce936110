from __future__ import annotations

import logging
import time
from dataclasses import dataclass, field, replace
from types import MappingProxyType
from typing import Callable, Iterable, Literal, Mapping, Sequence

import numpy as np
from scipy.linalg import cho_factor, cho_solve
from scipy.sparse import csr_matrix
from scipy.sparse.csgraph import shortest_path
from scipy.special import logsumexp

from app.domain.entities.approx import KernelBasis, LagrangianState, ValueApprox
from app.domain.entities.automaton import mode_sort_key
from app.domain.entities.decomposition import Decomposition
from app.domain.entities.mdp import LabeledMdp, State
from app.domain.entities.product import ProductState
from app.domain.entities.simulation import Trajectory
from app.domain.entities.values import SoftPolicy
from app.domain.exceptions import DivergenceError, SimulationError, SolverError
from app.domain.ports.simulator import SimulatorPort
from app.domain.services.simulation_service import sample_trajectory

logger = logging.getLogger(__name__)

Estimator = Literal['trajectories', 'uniform']
BoundaryMode = Literal['value', 'reward']


@dataclass(frozen=True)
class TadpParameters:
    gamma: float = 0.9
    tau: float = 2.0
    epsilon: float = 1e-3
    alpha: float = 60.0
    b: float = 1.5
    eta: float = 0.1
    nu0: float = 2.0
    lambda0: float = 0.0
    nu_max: float = 1e3
    n_trajectories: int = 30
    max_traj_len: int = 3
    seed: int = 0
    max_inner: int = 40
    max_outer: int = 50
    theta_bound: float = 1e6
    max_grad_norm: float | None = None
    eta_decay: float = 0.0
    successor_samples: int = 20
    estimator: Estimator = 'trajectories'
    boundary_mode: BoundaryMode = 'value'
    theta_init: float = 0.0
    stabilize_window: int = 50
    tracked_states: tuple[ProductState, ...] = ()

    def __post_init__(self) -> None:
        if not 0.0 < self.gamma < 1.0:
            raise SolverError(f'Fator de desconto fora de (0,1). gamma={self.gamma}')
        if self.tau <= 0 or self.epsilon <= 0 or self.alpha <= 0 or self.eta <= 0:
            raise SolverError('tau, epsilon, alpha e eta devem ser positivos.')
        if self.b < 1.0 or self.nu0 <= 0 or self.nu_max < self.nu0 or self.lambda0 < 0:
            raise SolverError(f'Parametros de penalidade invalidos. b={self.b} nu0={self.nu0} nu_max={self.nu_max}')
        if min(self.n_trajectories, self.max_traj_len, self.max_inner, self.max_outer, self.successor_samples) < 1:
            raise SolverError('Contagens de amostragem e de iteracoes devem ser positivas.')
        if self.estimator not in ('trajectories', 'uniform'):
            raise SolverError(f'Estimador desconhecido. estimador={self.estimator}')
        if self.boundary_mode not in ('value', 'reward'):
            raise SolverError(f'Modo de fronteira desconhecido. modo={self.boundary_mode}')

    def initial_multipliers(self) -> LagrangianState:
        return LagrangianState(
            lam=self.lambda0,
            nu=self.nu0,
            b=self.b,
            eta=self.eta,
            alpha=self.alpha,
            epsilon=self.epsilon,
            nu_max=self.nu_max,
        )


# Kernel features -----------------------------------------------------------


def shortest_path_lengths(mdp: LabeledMdp, blocked: Iterable[State] = ()) -> np.ndarray:
    """All-pairs hop counts on the undirected positive-probability move graph."""
    blocked = set(blocked)
    n = len(mdp.states)
    tails: list[int] = []
    heads: list[int] = []
    for i, state in enumerate(mdp.states):
        if state in blocked:
            continue
        for action in mdp.actions_at(state):
            for target, prob in mdp.transition[(state, action)].items():
                if prob <= 0 or target == state or target in blocked:
                    continue
                tails.append(i)
                heads.append(mdp.index_of(target))

    graph = csr_matrix((np.ones(len(tails)), (tails, heads)), shape=(n, n))
    return shortest_path(graph, directed=False, unweighted=True)


def default_centers(mdp: LabeledMdp, interval: int) -> tuple[State, ...]:
    if interval < 1:
        raise SolverError(f'Intervalo de centros invalido. intervalo={interval}')
    if mdp.grid_size is not None:
        return tuple(cell for cell in mdp.states if cell[0] % interval == 0 and cell[1] % interval == 0)
    return tuple(mdp.states[::interval])


def build_kernel_basis(
    mdp: LabeledMdp,
    *,
    sigma: float,
    center_interval: int = 1,
    centers: Sequence[State] | None = None,
    blocked: Iterable[State] = (),
) -> KernelBasis:
    chosen = tuple(centers) if centers is not None else default_centers(mdp, center_interval)
    for center in chosen:
        if not mdp.has_state(center):
            raise SolverError(f'Centro fora do MDP. centro={center}')
    if sigma <= 0:
        raise SolverError(f'Largura do kernel deve ser positiva. sigma={sigma}')
    all_pairs = shortest_path_lengths(mdp, blocked)
    columns = [mdp.index_of(center) for center in chosen]
    distances = all_pairs[:, columns]
    features = np.exp(-np.square(distances) / (2.0 * sigma**2))
    logger.info('Base de kernels construida. centros=%s sigma=%s', len(chosen), sigma)
    return KernelBasis(states=mdp.states, centers=chosen, sigma=sigma, distances=distances, features=features)


def kernel_feature(basis: KernelBasis, state: State) -> np.ndarray:
    return np.array(basis.feature(state))


def penalty(x: float | np.ndarray) -> float | np.ndarray:
    return np.maximum(x, 0.0)


# Per-level sample-average model -------------------------------------------


@dataclass(frozen=True)
class LevelModel:
    """Sample-average successor model of one level, built only through the simulator.

    Weights are the level's joint parameter vector in value units, so
    ``phi @ w`` lies on the same scale as pinned values; ``alpha`` enters only
    through the backup. The block of mode ``q`` is ``blocks[q]``.
    """

    level: int
    modes: tuple[str, ...]
    states: tuple[ProductState, ...]
    actions: tuple[str, ...]
    blocks: Mapping[str, slice]
    phi: np.ndarray
    psi: np.ndarray
    pinned_next: np.ndarray
    pinned_reward: np.ndarray
    mask: np.ndarray
    gamma: float
    tau: float
    alpha: float
    _index: Mapping[ProductState, int] = field(init=False, repr=False, compare=False)
    _action_pos: Mapping[str, int] = field(init=False, repr=False, compare=False)

    def __post_init__(self) -> None:
        object.__setattr__(self, '_index', MappingProxyType({state: i for i, state in enumerate(self.states)}))
        object.__setattr__(self, '_action_pos', MappingProxyType({a: k for k, a in enumerate(self.actions)}))

    @property
    def size(self) -> int:
        return len(self.states)

    @property
    def dim(self) -> int:
        return int(self.phi.shape[1])

    def contains(self, state: ProductState) -> bool:
        return state in self._index

    def index_of(self, state: ProductState) -> int:
        try:
            return self._index[state]
        except KeyError as exc:
            raise SolverError(f'Estado fora do nivel. nivel={self.level} estado={state}') from exc

    def steps_of(self, trajectory: Trajectory) -> tuple[np.ndarray, np.ndarray]:
        states = np.array([self.index_of(step.state) for step in trajectory.steps], dtype=np.int64)
        actions = np.array([self._action_pos[step.action] for step in trajectory.steps], dtype=np.int64)
        return states, actions


PinnedValue = Callable[[ProductState], float]


def build_level_model(
    simulator: SimulatorPort,
    basis: KernelBasis,
    modes: Sequence[str],
    pinned_value: PinnedValue,
    params: TadpParameters,
    rng: np.random.Generator,
    *,
    level: int = 0,
) -> LevelModel:
    modes = tuple(sorted(modes, key=mode_sort_key))
    width = basis.size
    blocks = {mode: slice(k * width, (k + 1) * width) for k, mode in enumerate(modes)}
    states = tuple((s, q) for q in modes for s in basis.states)
    actions = tuple(simulator.actions)
    action_pos = {action: k for k, action in enumerate(actions)}
    n, m, dim = len(states), len(actions), width * len(modes)

    phi = np.zeros((n, dim))
    for k, mode in enumerate(modes):
        phi[k * len(basis.states):(k + 1) * len(basis.states), blocks[mode]] = basis.features
    psi = np.zeros((n, m, dim))
    pinned_next = np.zeros((n, m))
    pinned_reward = np.zeros((n, m))
    mask = np.zeros((n, m), dtype=bool)
    samples = params.successor_samples

    for i, state in enumerate(states):
        available = simulator.actions_at(state)
        if not available:
            raise SolverError(f'Estado sem acoes disponiveis. estado={state}')
        for action in available:
            j = action_pos[action]
            mask[i, j] = True
            for _ in range(samples):
                next_state, reward = simulator.step(state, action, rng)
                s_next, q_next = next_state
                if q_next in blocks:
                    psi[i, j, blocks[q_next]] += kernel_feature(basis, s_next)
                elif params.boundary_mode == 'reward':
                    if simulator.is_accepting(next_state):
                        pinned_reward[i, j] += params.alpha * reward
                    else:
                        pinned_reward[i, j] += pinned_value(next_state)
                else:
                    pinned_next[i, j] += pinned_value(next_state)
    psi /= samples
    pinned_next /= samples
    pinned_reward /= samples

    logger.debug('Modelo amostral do nivel construido. nivel=%s estados=%s parametros=%s', level, n, dim)
    return LevelModel(
        level=level,
        modes=modes,
        states=states,
        actions=actions,
        blocks=MappingProxyType(blocks),
        phi=phi,
        psi=psi,
        pinned_next=pinned_next,
        pinned_reward=pinned_reward,
        mask=mask,
        gamma=params.gamma,
        tau=params.tau,
        alpha=params.alpha,
    )


@dataclass(frozen=True)
class LevelEvaluation:
    values: np.ndarray
    q: np.ndarray
    backup: np.ndarray
    residual: np.ndarray
    pi: np.ndarray
    expected_psi: np.ndarray
    grad_residual: np.ndarray

    def log_pi(self, states: np.ndarray, actions: np.ndarray, tau: float) -> np.ndarray:
        return (self.q[states, actions] - self.backup[states]) / tau


def evaluate_level(model: LevelModel, weights: np.ndarray) -> LevelEvaluation:
    """Softmax backup of ``phi @ w`` with the residual in value units."""
    values = model.phi @ weights
    q = model.pinned_reward + model.gamma * (model.alpha * (model.psi @ weights) + model.pinned_next)
    q = np.where(model.mask, q, -np.inf)
    backup = model.tau * logsumexp(q / model.tau, axis=1)
    pi = np.exp((q - backup[:, None]) / model.tau)
    expected_psi = np.einsum('nm,nmd->nd', pi, model.psi)
    return LevelEvaluation(
        values=values,
        q=q,
        backup=backup,
        residual=backup / model.alpha - values,
        pi=pi,
        expected_psi=expected_psi,
        grad_residual=model.gamma * expected_psi - model.phi,
    )


def level_weights(model: LevelModel, approx: ValueApprox) -> np.ndarray:
    weights = np.zeros(model.dim)
    for mode, block in model.blocks.items():
        if mode in approx.theta:
            weights[block] = approx.theta[mode]
    return weights


def constraint_residual(model: LevelModel, approx: ValueApprox, state: ProductState) -> float:
    """g = B V - V at ``state`` in amplified units; 0 for pinned states."""
    _, mode = state
    if mode in approx.pinned or mode not in model.blocks:
        return 0.0
    evaluation = evaluate_level(model, level_weights(model, approx))
    return float(model.alpha * evaluation.residual[model.index_of(state)])


# Augmented Lagrangian pieces ----------------------------------------------


def state_objective(evaluation: LevelEvaluation, ls: LagrangianState) -> np.ndarray:
    active = penalty(evaluation.residual)
    return evaluation.values + ls.lam * active + 0.5 * ls.nu * active**2


def state_objective_gradient(model: LevelModel, evaluation: LevelEvaluation, ls: LagrangianState) -> np.ndarray:
    g = evaluation.residual
    coefficient = ls.lam * (g > 0) + ls.nu * penalty(g)
    return model.phi + coefficient[:, None] * evaluation.grad_residual


def path_objective(
    model: LevelModel,
    weights: np.ndarray,
    ls: LagrangianState,
    trajectory: Trajectory,
    *,
    evaluation: LevelEvaluation | None = None,
) -> float:
    if not trajectory.steps:
        return 0.0
    evaluation = evaluation or evaluate_level(model, weights)
    states, _ = model.steps_of(trajectory)
    return float(state_objective(evaluation, ls)[states].sum())


def mc_gradient(
    model: LevelModel,
    weights: np.ndarray,
    ls: LagrangianState,
    trajectories: Sequence[Trajectory],
    *,
    evaluation: LevelEvaluation | None = None,
) -> np.ndarray:
    """Score-function term plus pathwise term, averaged over the batch."""
    if not trajectories:
        raise SimulationError('Lote de trajetorias vazio.')
    evaluation = evaluation or evaluate_level(model, weights)
    objective = state_objective(evaluation, ls)
    objective_grad = state_objective_gradient(model, evaluation, ls)
    score_term = np.zeros(model.dim)
    path_term = np.zeros(model.dim)
    for trajectory in trajectories:
        if not trajectory.steps:
            continue
        states, actions = model.steps_of(trajectory)
        spread = model.psi[states, actions] - evaluation.expected_psi[states]
        score = (model.alpha * model.gamma / model.tau) * spread.sum(axis=0)
        score_term += score * objective[states].sum()
        path_term += objective_grad[states].sum(axis=0)
    return (score_term + path_term) / len(trajectories)


def surrogate_objective(
    model: LevelModel,
    weights: np.ndarray,
    reference: np.ndarray,
    ls: LagrangianState,
    trajectories: Sequence[Trajectory],
) -> float:
    """Likelihood-ratio reweighted batch objective; its gradient at ``reference`` is ``mc_gradient``."""
    if not trajectories:
        raise SimulationError('Lote de trajetorias vazio.')
    current = evaluate_level(model, weights)
    base = evaluate_level(model, reference)
    objective = state_objective(current, ls)
    total = 0.0
    for trajectory in trajectories:
        if not trajectory.steps:
            continue
        states, actions = model.steps_of(trajectory)
        log_ratio = np.sum(current.log_pi(states, actions, model.tau) - base.log_pi(states, actions, model.tau))
        total += float(np.exp(log_ratio)) * float(objective[states].sum())
    return total / len(trajectories)


def uniform_objective(model: LevelModel, weights: np.ndarray, ls: LagrangianState, mass: float) -> float:
    evaluation = evaluate_level(model, weights)
    return float(mass / model.size * state_objective(evaluation, ls).sum())


def uniform_gradient(
    model: LevelModel,
    weights: np.ndarray,
    ls: LagrangianState,
    mass: float,
    *,
    evaluation: LevelEvaluation | None = None,
) -> np.ndarray:
    evaluation = evaluation or evaluate_level(model, weights)
    return mass / model.size * state_objective_gradient(model, evaluation, ls).sum(axis=0)


def update_multipliers(ls: LagrangianState, residual_expectation: float) -> LagrangianState:
    if residual_expectation < 0:
        raise SolverError(f'Esperanca da penalidade negativa. valor={residual_expectation}')
    return replace(
        ls,
        lam=ls.lam + ls.nu * residual_expectation,
        nu=min(ls.b * ls.nu, ls.nu_max),
        outer=ls.outer + 1,
        inner=0,
    )


def clip_gradient(gradient: np.ndarray, max_norm: float | None) -> np.ndarray:
    if max_norm is None:
        return gradient
    norm = float(np.linalg.norm(gradient))
    if norm > max_norm:
        return gradient * (max_norm / norm)
    return gradient


ARMIJO_SLOPE = 0.5
MAX_HALVINGS = 40


def value_metric(model: LevelModel) -> Callable[[np.ndarray], np.ndarray]:
    """Solver for the feature Gram ``phi.T @ phi / n``; maps parameter gradients to value-space steps."""
    gram = model.phi.T @ model.phi / max(model.size, 1)
    ridge = 1e-6 * float(np.trace(gram)) / max(model.dim, 1)
    factor = cho_factor(gram + ridge * np.eye(model.dim))
    return lambda gradient: cho_solve(factor, gradient)


@dataclass(frozen=True)
class InnerResult:
    weights: np.ndarray
    state: LagrangianState
    epochs: int
    last_change: float
    previous: np.ndarray
    momentum: int


Sampler = Callable[[LevelEvaluation], list[Trajectory]]
EpochHook = Callable[[int, np.ndarray, float], None]
MetricSolve = Callable[[np.ndarray], np.ndarray]


def _descent_direction(
    model: LevelModel,
    point: np.ndarray,
    ls: LagrangianState,
    sampler: Sampler | None,
    params: TadpParameters,
    solve: MetricSolve,
) -> tuple[np.ndarray, np.ndarray]:
    mass = float(params.max_traj_len)
    evaluation = evaluate_level(model, point)
    explicit = uniform_gradient(model, point, ls, mass, evaluation=evaluation)
    direction = solve(clip_gradient(explicit, params.max_grad_norm))
    if params.estimator == 'trajectories':
        batch = sampler(evaluation)
        sampled = solve(clip_gradient(mc_gradient(model, point, ls, batch, evaluation=evaluation), params.max_grad_norm))
        if float(sampled @ explicit) > 0:
            return sampled, explicit
        logger.debug('Direcao amostrada sem descida; usando o gradiente explicito. nivel=%s', model.level)
    return direction, explicit


def _backtrack(
    model: LevelModel,
    point: np.ndarray,
    direction: np.ndarray,
    explicit: np.ndarray,
    ls: LagrangianState,
    mass: float,
    nominal: float,
) -> tuple[np.ndarray, float, float]:
    base = uniform_objective(model, point, ls, mass)
    slope = float(direction @ explicit)
    step = nominal
    for halving in range(MAX_HALVINGS):
        candidate = point - step * direction
        trial = uniform_objective(model, candidate, ls, mass)
        if trial <= base - ARMIJO_SLOPE * step * slope or halving == MAX_HALVINGS - 1:
            break
        step /= 2.0
    return candidate, trial, step


def inner_optimize(
    model: LevelModel,
    weights: np.ndarray,
    ls: LagrangianState,
    sampler: Sampler | None,
    params: TadpParameters,
    *,
    epoch_offset: int = 0,
    on_epoch: EpochHook | None = None,
    previous: np.ndarray | None = None,
    momentum: int = 0,
) -> InnerResult:
    """Gradient steps on the augmented Lagrangian until the values settle.

    Directions are taken in the value metric of the features from a restarted
    momentum point; each step starts at the learning rate and is halved until
    the explicit state-weighted objective decreases enough. A momentum step
    that ends above the current objective is retried from the current weights.
    A sampled direction that does not descend on the explicit objective is
    replaced by the explicit gradient. The settle test scales the value change
    back to the nominal step.
    """
    if params.estimator == 'trajectories' and sampler is None:
        raise SolverError('Estimador por trajetorias exige um amostrador.')
    mass = float(params.max_traj_len)
    solve = value_metric(model)
    weights = np.array(weights, dtype=float)
    previous = weights.copy() if previous is None else np.array(previous, dtype=float)
    current = uniform_objective(model, weights, ls, mass)
    values_before = model.phi @ weights
    change = float('inf')
    epochs = 0
    for j in range(params.max_inner):
        nominal = ls.eta / (1.0 + params.eta_decay * (epoch_offset + j))
        anchor = weights + momentum / (momentum + 3.0) * (weights - previous)
        direction, explicit = _descent_direction(model, anchor, ls, sampler, params, solve)
        candidate, trial, step = _backtrack(model, anchor, direction, explicit, ls, mass, nominal)
        if trial > current:
            momentum = 0
            direction, explicit = _descent_direction(model, weights, ls, sampler, params, solve)
            candidate, trial, step = _backtrack(model, weights, direction, explicit, ls, mass, nominal)
        else:
            momentum += 1

        theta_norm = float(np.linalg.norm(candidate))
        if not np.isfinite(theta_norm) or theta_norm > params.theta_bound:
            raise DivergenceError(
                'Pesos divergiram.',
                level=model.level,
                epoch=epoch_offset + j,
                theta_norm=theta_norm,
            )
        previous, weights, current = weights, candidate, trial

        values = model.phi @ weights
        moved = float(np.max(np.abs(values - values_before))) if values.size else 0.0
        change = moved * nominal / step
        values_before = values
        ls = ls.advance_inner()
        epochs += 1
        if on_epoch is not None:
            on_epoch(epoch_offset + j, values, change)
        if change <= ls.epsilon:
            break
    return InnerResult(
        weights=weights,
        state=ls,
        epochs=epochs,
        last_change=change,
        previous=previous,
        momentum=momentum,
    )


# Level-ordered solve -------------------------------------------------------


@dataclass(frozen=True, slots=True)
class ConvergenceRecord:
    epoch: int
    level: int
    state: ProductState
    value: float


@dataclass(frozen=True)
class LevelReport:
    level: int
    modes: tuple[str, ...]
    epochs: int
    outer_iterations: int
    lam: float
    nu: float
    max_violation: float
    grad_norm: float
    stable_epoch: int | None
    wall_time_s: float

    def as_dict(self) -> dict:
        return {
            'level': self.level,
            'modes': list(self.modes),
            'epochs': self.epochs,
            'outer_iterations': self.outer_iterations,
            'lambda': round(self.lam, 9),
            'nu': round(self.nu, 9),
            'max_violation': round(self.max_violation, 9),
            'grad_norm': round(self.grad_norm, 9),
            'stable_epoch': self.stable_epoch,
            'wall_time_s': round(self.wall_time_s, 6),
        }


@dataclass(frozen=True)
class TadpResult:
    approx: ValueApprox
    policy: SoftPolicy
    levels: tuple[LevelReport, ...]
    trace: tuple[ConvergenceRecord, ...]
    wall_time_s: float

    @property
    def epochs(self) -> int:
        return sum(report.epochs for report in self.levels)


LevelHook = Callable[[int, tuple[str, ...], ValueApprox], None]
TadpEpochHook = Callable[[int, int, np.ndarray], None]


def _default_tracked(model: LevelModel) -> list[int]:
    picks = np.linspace(0, model.size - 1, num=min(3, model.size)).round().astype(int)
    return sorted(set(int(i) for i in picks))


def _constraint_pool(model: LevelModel, decomposition: Decomposition) -> np.ndarray:
    cells: dict[str, frozenset[State]] = {}
    for mode in model.modes:
        meta = decomposition.meta_mode_of(mode)
        cells[mode] = decomposition.constraint_states(meta) if meta is not None else frozenset()
    pool = [i for i, (s, mode) in enumerate(model.states) if s in cells[mode]]
    return np.array(pool or range(model.size), dtype=np.int64)


class _StabilityWatch:
    def __init__(self, epsilon: float, window: int) -> None:
        self.epsilon = epsilon
        self.window = window
        self.run = 0
        self.stable_epoch: int | None = None

    def observe(self, epoch: int, change: float) -> None:
        self.run = self.run + 1 if change < self.epsilon else 0
        if self.stable_epoch is None and self.run >= self.window:
            self.stable_epoch = epoch - self.window + 1


def tadp_solve(
    simulator: SimulatorPort,
    decomposition: Decomposition,
    basis: KernelBasis,
    params: TadpParameters,
    *,
    on_level: LevelHook | None = None,
    on_epoch: TadpEpochHook | None = None,
) -> TadpResult:
    """Solve the levels in backup order using only sampled transitions."""
    started = time.perf_counter()
    rng = np.random.default_rng(params.seed)
    approx = ValueApprox(basis={mode: basis for mode in decomposition.all_modes}, alpha=params.alpha)
    for mode in decomposition.accepting_modes:
        approx.pinned[mode] = 1.0
    for mode in decomposition.dropped_modes:
        approx.pinned.setdefault(mode, 0.0)

    def pinned_value(state: ProductState) -> float:
        s, mode = state
        if mode in approx.pinned:
            return params.alpha * approx.pinned[mode]
        if mode in approx.theta:
            return params.alpha * approx.value(s, mode)
        raise SolverError(f'Sucessor em modo ainda nao resolvido. estado={state}')

    reports: list[LevelReport] = []
    trace: list[ConvergenceRecord] = []
    solved: list[tuple[LevelModel, LevelEvaluation]] = []

    for k in range(len(decomposition.levels)):
        modes = tuple(mode for mode in decomposition.level_modes(k) if mode not in approx.pinned)
        if not modes:
            continue
        level_started = time.perf_counter()
        model = build_level_model(simulator, basis, modes, pinned_value, params, rng, level=k)
        keep_modes = frozenset(model.modes)
        start_pool = _constraint_pool(model, decomposition)
        tracked = [model.index_of(state) for state in params.tracked_states if model.contains(state)]
        if not params.tracked_states:
            tracked = _default_tracked(model)
        watch = _StabilityWatch(params.epsilon, params.stabilize_window)

        def sampler(evaluation: LevelEvaluation) -> list[Trajectory]:
            policy = SoftPolicy(states=model.states, actions=model.actions, dist=evaluation.pi, q_values=evaluation.q)
            starts = rng.choice(start_pool, size=params.n_trajectories)
            return [
                sample_trajectory(simulator, policy, model.states[int(i)], params.max_traj_len, rng, keep_modes=keep_modes)
                for i in starts
            ]

        def record(epoch: int, values: np.ndarray, change: float) -> None:
            watch.observe(epoch, change)
            for i in tracked:
                trace.append(
                    ConvergenceRecord(epoch=epoch, level=k, state=model.states[i], value=float(values[i]))
                )
            if on_epoch is not None:
                on_epoch(k, epoch, values)
            logger.debug('Epoca concluida. nivel=%s epoca=%s variacao=%.3e', k, epoch, change)

        weights = np.full(model.dim, params.theta_init)
        previous: np.ndarray | None = None
        momentum = 0
        ls = params.initial_multipliers()
        epochs = 0
        outer_done = 0
        grad_norm = float('inf')
        for _ in range(params.max_outer):
            inner = inner_optimize(
                model,
                weights,
                ls,
                sampler,
                params,
                epoch_offset=epochs,
                on_epoch=record,
                previous=previous,
                momentum=momentum,
            )
            weights, ls = inner.weights, inner.state
            previous, momentum = inner.previous, inner.momentum
            epochs += inner.epochs
            evaluation = evaluate_level(model, weights)
            grad_norm = float(np.linalg.norm(uniform_gradient(model, weights, ls, params.max_traj_len, evaluation=evaluation)))
            expectation = float(np.mean(penalty(evaluation.residual)))
            ls = update_multipliers(ls, expectation)
            outer_done += 1
            logger.info(
                'Iteracao externa concluida. nivel=%s externa=%s epocas=%s lambda=%.4f nu=%.4f violacao_media=%.3e gradiente=%.3e',
                k,
                outer_done,
                epochs,
                ls.lam,
                ls.nu,
                expectation,
                grad_norm,
            )
            if grad_norm <= params.epsilon:
                break

        for mode in model.modes:
            approx.theta[mode] = weights[model.blocks[mode]].copy()
        evaluation = evaluate_level(model, weights)
        solved.append((model, evaluation))
        report = LevelReport(
            level=k,
            modes=model.modes,
            epochs=epochs,
            outer_iterations=outer_done,
            lam=ls.lam,
            nu=ls.nu,
            max_violation=params.alpha * float(np.max(penalty(evaluation.residual))),
            grad_norm=grad_norm,
            stable_epoch=watch.stable_epoch,
            wall_time_s=time.perf_counter() - level_started,
        )
        reports.append(report)
        logger.info(
            'Nivel TADP resolvido. nivel=%s modos=%s epocas=%s violacao_max=%.3e',
            k,
            list(model.modes),
            epochs,
            report.max_violation,
        )
        if on_level is not None:
            on_level(k, model.modes, approx)

    policy = _assemble_policy(simulator, decomposition, basis, solved)
    return TadpResult(
        approx=approx,
        policy=policy,
        levels=tuple(reports),
        trace=tuple(trace),
        wall_time_s=time.perf_counter() - started,
    )


def _assemble_policy(
    simulator: SimulatorPort,
    decomposition: Decomposition,
    basis: KernelBasis,
    solved: Sequence[tuple[LevelModel, LevelEvaluation]],
) -> SoftPolicy:
    actions = tuple(simulator.actions)
    states = tuple((s, q) for q in decomposition.all_modes for s in basis.states)
    index = {state: i for i, state in enumerate(states)}
    dist = np.zeros((len(states), len(actions)))
    q_table = np.full((len(states), len(actions)), np.nan)
    learned = np.zeros(len(states), dtype=bool)

    for model, evaluation in solved:
        rows = np.array([index[state] for state in model.states], dtype=np.int64)
        dist[rows] = evaluation.pi
        q_table[rows] = np.where(model.mask, evaluation.q, np.nan)
        learned[rows] = True

    position = {action: k for k, action in enumerate(actions)}
    for i in np.flatnonzero(~learned):
        available = simulator.actions_at(states[i]) or actions
        for action in available:
            dist[i, position[action]] = 1.0 / len(available)

    return SoftPolicy(states=states, actions=actions, dist=dist, q_values=q_table)
