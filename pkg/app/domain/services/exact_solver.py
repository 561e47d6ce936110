from __future__ import annotations

import logging
import time
from typing import Callable, Iterable, Literal, Mapping

import numpy as np
from scipy.special import logsumexp

from app.domain.entities.decomposition import Decomposition
from app.domain.entities.product import ProductMdp, ProductState
from app.domain.entities.values import SoftPolicy, ValueTable
from app.domain.exceptions import ConvergenceError, SolverError

logger = logging.getLogger(__name__)

Operator = Literal['softmax', 'hardmax']
Sense = Literal['max', 'min']
Convention = Literal['reward', 'boundary']
StopRule = Literal['residual', 'value']

DEFAULT_MAX_SWEEPS = 100_000

LevelCallback = Callable[[int, np.ndarray, np.ndarray], None]


def _values_of(values: ValueTable | np.ndarray) -> np.ndarray:
    return values.values if isinstance(values, ValueTable) else np.asarray(values, dtype=float)


def _resolve(product: ProductMdp, state: int | ProductState) -> int:
    if isinstance(state, (int, np.integer)):
        if not 0 <= int(state) < product.size:
            raise SolverError(f'Indice de estado fora do produto. indice={state}')
        return int(state)
    return product.index_of(state)


def _check_operator(operator: str, sense: str, convention: str) -> None:
    if operator not in ('softmax', 'hardmax'):
        raise SolverError(f'Operador desconhecido. operador={operator}')
    if sense not in ('max', 'min'):
        raise SolverError(f'Sentido desconhecido. sentido={sense}')
    if convention not in ('reward', 'boundary'):
        raise SolverError(f'Convencao desconhecida. convencao={convention}')


def scaled_rewards(product: ProductMdp, i: int, *, alpha: float = 1.0, convention: Convention = 'reward') -> np.ndarray:
    actions = product.row_actions[i]
    if convention == 'boundary':
        return np.zeros(actions.size)
    return alpha * product.reward[i, actions]


def q_values(
    product: ProductMdp,
    values: ValueTable | np.ndarray,
    state: int | ProductState,
    *,
    alpha: float = 1.0,
    convention: Convention = 'reward',
) -> np.ndarray:
    """Q over the actions available at ``state``, aligned with ``row_actions``."""
    i = _resolve(product, state)
    v = _values_of(values)
    weighted = product.row_probs[i] * v[product.row_targets[i]]
    expected = np.add.reduceat(weighted, product.row_starts[i])
    return scaled_rewards(product, i, alpha=alpha, convention=convention) + product.gamma * expected


def softmax_backup(
    product: ProductMdp,
    values: ValueTable | np.ndarray,
    state: int | ProductState,
    *,
    alpha: float = 1.0,
    convention: Convention = 'reward',
) -> float:
    q = q_values(product, values, state, alpha=alpha, convention=convention)
    return float(product.tau * logsumexp(q / product.tau))


def hardmax_backup(
    product: ProductMdp,
    values: ValueTable | np.ndarray,
    state: int | ProductState,
    *,
    sense: Sense = 'max',
    alpha: float = 1.0,
    convention: Convention = 'reward',
) -> float:
    q = q_values(product, values, state, alpha=alpha, convention=convention)
    position = int(np.argmin(q)) if sense == 'min' else int(np.argmax(q))
    return float(q[position])


def greedy_action(
    product: ProductMdp,
    values: ValueTable | np.ndarray,
    state: int | ProductState,
    *,
    sense: Sense = 'max',
    alpha: float = 1.0,
    convention: Convention = 'reward',
) -> str:
    i = _resolve(product, state)
    q = q_values(product, values, i, alpha=alpha, convention=convention)
    position = int(np.argmin(q)) if sense == 'min' else int(np.argmax(q))
    return product.actions[int(product.row_actions[i][position])]


def _backup_fn(
    product: ProductMdp,
    operator: Operator,
    sense: Sense,
    alpha: float,
    convention: Convention,
) -> Callable[[np.ndarray, int], float]:
    rewards = [scaled_rewards(product, i, alpha=alpha, convention=convention) for i in range(product.size)]
    gamma = product.gamma
    tau = product.tau
    targets = product.row_targets
    probs = product.row_probs
    starts = product.row_starts

    def backup(v: np.ndarray, i: int) -> float:
        q = rewards[i] + gamma * np.add.reduceat(probs[i] * v[targets[i]], starts[i])
        if operator == 'softmax':
            return float(tau * logsumexp(q / tau))
        return float(q.min() if sense == 'min' else q.max())

    return backup


def pinned_values(
    product: ProductMdp,
    *,
    convention: Convention = 'reward',
    alpha: float = 1.0,
    dropped_modes: Iterable[str] = (),
) -> dict[int, float]:
    """Boundary values that no solver ever updates."""
    accepting_value = alpha if convention == 'boundary' else 0.0
    pins = {i: accepting_value for i in product.accepting}
    pins.update({i: 0.0 for i in product.dead})
    dropped = set(dropped_modes)
    if dropped:
        pins.update({i: 0.0 for i, (_, mode) in enumerate(product.states) if mode in dropped and i not in pins})
    return pins


def bellman_operator(
    product: ProductMdp,
    values: ValueTable | np.ndarray,
    *,
    operator: Operator = 'softmax',
    sense: Sense = 'max',
    alpha: float = 1.0,
    convention: Convention = 'reward',
    pinned: Mapping[int, float] | None = None,
) -> np.ndarray:
    """One synchronous application of the Bellman operator to every unpinned state."""
    _check_operator(operator, sense, convention)
    v = _values_of(values)
    backup = _backup_fn(product, operator, sense, alpha, convention)
    result = np.array([backup(v, i) for i in range(product.size)], dtype=float)
    for i, value in (pinned or {}).items():
        result[i] = value
    return result


def _threshold(epsilon: float, gamma: float, stop_rule: StopRule, levels: int = 1) -> float:
    if stop_rule == 'residual':
        return epsilon
    if stop_rule == 'value':
        return epsilon * (1.0 - gamma) / gamma / max(levels, 1)
    raise SolverError(f'Regra de parada desconhecida. regra={stop_rule}')


def _sweep_until_converged(
    backup: Callable[[np.ndarray, int], float],
    values: np.ndarray,
    order: np.ndarray,
    threshold: float,
    max_sweeps: int,
) -> tuple[int, int, float]:
    sweeps = 0
    backups = 0
    residual = 0.0
    if order.size == 0:
        return sweeps, backups, residual
    while True:
        residual = 0.0
        for i in order:
            updated = backup(values, int(i))
            change = abs(updated - values[i])
            if change > residual:
                residual = change
            values[i] = updated
        sweeps += 1
        backups += int(order.size)
        if residual < threshold:
            return sweeps, backups, residual
        if sweeps >= max_sweeps:
            raise ConvergenceError('Limite de varreduras atingido.', last_residual=residual, sweeps=sweeps)


def value_iteration(
    product: ProductMdp,
    *,
    operator: Operator = 'softmax',
    sense: Sense = 'max',
    epsilon: float = 1e-3,
    alpha: float = 1.0,
    convention: Convention = 'reward',
    restrict: Iterable[int] | None = None,
    boundary: Mapping[int, float] | None = None,
    dropped_modes: Iterable[str] = (),
    initial: np.ndarray | None = None,
    stop_rule: StopRule = 'residual',
    max_sweeps: int = DEFAULT_MAX_SWEEPS,
) -> ValueTable:
    """Gauss-Seidel value iteration in ascending product-state order."""
    _check_operator(operator, sense, convention)
    if epsilon <= 0:
        raise SolverError(f'Tolerancia deve ser positiva. epsilon={epsilon}')
    started = time.perf_counter()
    pins = pinned_values(product, convention=convention, alpha=alpha, dropped_modes=dropped_modes)
    pins.update(boundary or {})

    values = np.zeros(product.size) if initial is None else np.array(initial, dtype=float)
    for i, value in pins.items():
        values[i] = value
    candidates = range(product.size) if restrict is None else restrict
    order = np.array(sorted({int(i) for i in candidates} - set(pins)), dtype=np.int64)

    backup = _backup_fn(product, operator, sense, alpha, convention)
    threshold = _threshold(epsilon, product.gamma, stop_rule)
    sweeps, backups, residual = _sweep_until_converged(backup, values, order, threshold, max_sweeps)

    table = ValueTable(
        values=values,
        backup_count=backups,
        sweeps=sweeps,
        residual=residual,
        alpha=alpha,
        wall_time_s=time.perf_counter() - started,
        level_backups=(backups,),
        level_sweeps=(sweeps,),
    )
    logger.info(
        'Iteracao de valor concluida. operador=%s varreduras=%s backups=%s residuo=%.3e',
        operator,
        sweeps,
        backups,
        residual,
    )
    return table


def level_state_indices(product: ProductMdp, decomposition: Decomposition, level: int) -> np.ndarray:
    modes = set(decomposition.level_modes(level)) - set(decomposition.accepting_modes)
    return np.array([i for i, (_, mode) in enumerate(product.states) if mode in modes], dtype=np.int64)


def check_compatible(product: ProductMdp, decomposition: Decomposition) -> None:
    if set(product.modes) != set(decomposition.all_modes):
        raise SolverError(
            f'Decomposicao incompativel com o produto. modos_produto={list(product.modes)} '
            f'modos_decomposicao={list(decomposition.all_modes)}'
        )


def topological_value_iteration(
    product: ProductMdp,
    decomposition: Decomposition,
    *,
    operator: Operator = 'softmax',
    sense: Sense = 'max',
    epsilon: float = 1e-3,
    alpha: float = 1.0,
    convention: Convention = 'reward',
    stop_rule: StopRule = 'residual',
    max_sweeps: int = DEFAULT_MAX_SWEEPS,
    on_level: LevelCallback | None = None,
) -> ValueTable:
    """Value iteration one level set at a time, earlier levels pinned."""
    _check_operator(operator, sense, convention)
    check_compatible(product, decomposition)
    if epsilon <= 0:
        raise SolverError(f'Tolerancia deve ser positiva. epsilon={epsilon}')
    started = time.perf_counter()

    pins = pinned_values(product, convention=convention, alpha=alpha, dropped_modes=decomposition.dropped_modes)
    values = np.zeros(product.size)
    for i, value in pins.items():
        values[i] = value

    level_orders = [
        np.array([i for i in level_state_indices(product, decomposition, k) if int(i) not in pins], dtype=np.int64)
        for k in range(len(decomposition.levels))
    ]
    solved_levels = sum(1 for order in level_orders if order.size)
    threshold = _threshold(epsilon, product.gamma, stop_rule, solved_levels)
    backup = _backup_fn(product, operator, sense, alpha, convention)

    level_backups: list[int] = []
    level_sweeps: list[int] = []
    residual = 0.0
    for k, order in enumerate(level_orders):
        sweeps, backups, level_residual = _sweep_until_converged(backup, values, order, threshold, max_sweeps)
        residual = max(residual, level_residual)
        level_backups.append(backups)
        level_sweeps.append(sweeps)
        logger.info(
            'Nivel resolvido. nivel=%s estados=%s varreduras=%s backups=%s residuo=%.3e',
            k,
            order.size,
            sweeps,
            backups,
            level_residual,
        )
        if on_level is not None:
            on_level(k, values.copy(), order)

    return ValueTable(
        values=values,
        backup_count=sum(level_backups),
        sweeps=sum(level_sweeps),
        residual=residual,
        alpha=alpha,
        wall_time_s=time.perf_counter() - started,
        level_backups=tuple(level_backups),
        level_sweeps=tuple(level_sweeps),
    )


def extract_policy(
    product: ProductMdp,
    values: ValueTable | np.ndarray,
    *,
    operator: Operator = 'softmax',
    sense: Sense = 'max',
    alpha: float = 1.0,
    convention: Convention = 'reward',
) -> SoftPolicy:
    _check_operator(operator, sense, convention)
    v = _values_of(values)
    n_actions = len(product.actions)
    dist = np.zeros((product.size, n_actions))
    q_table = np.full((product.size, n_actions), np.nan)
    for i in range(product.size):
        actions = product.row_actions[i]
        q = q_values(product, v, i, alpha=alpha, convention=convention)
        q_table[i, actions] = q
        if operator == 'softmax':
            v_b = product.tau * logsumexp(q / product.tau)
            dist[i, actions] = np.exp((q - v_b) / product.tau)
        else:
            position = int(np.argmin(q)) if sense == 'min' else int(np.argmax(q))
            dist[i, actions[position]] = 1.0
    return SoftPolicy(
        states=product.states,
        actions=product.actions,
        dist=dist,
        q_values=q_table,
        deterministic=operator == 'hardmax',
    )
