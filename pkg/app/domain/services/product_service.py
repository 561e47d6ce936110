from __future__ import annotations

import logging
import math
import numpy as np
from scipy.sparse import csr_matrix
from scipy.sparse.csgraph import breadth_first_order

from app.domain.entities.automaton import AtomicPropositionSet, TaskDfa
from app.domain.entities.mdp import LabeledMdp, State
from app.domain.entities.product import ProductMdp, ProductState
from app.domain.exceptions import ProductError
from app.domain.services.automata_service import coaccessible_modes, step

logger = logging.getLogger(__name__)


def _validate_inputs(mdp: LabeledMdp, dfa: TaskDfa, gamma: float, tau: float) -> None:
    if not 0.0 < gamma < 1.0:
        raise ProductError(f'Fator de desconto fora de (0,1). gamma={gamma}')
    if not tau > 0.0 or not math.isfinite(tau):
        raise ProductError(f'Temperatura deve ser positiva. tau={tau}')
    missing = set(dfa.alphabet_props.props) - set(mdp.props.props)
    if missing:
        raise ProductError(f'Automato referencia proposicoes ausentes no MDP. proposicoes={sorted(missing)}')


def projected_labels(mdp: LabeledMdp, dfa: TaskDfa) -> dict[State, AtomicPropositionSet]:
    return {state: mdp.label_of(state).intersection(dfa.alphabet_props) for state in mdp.states}


def build_product(
    mdp: LabeledMdp,
    dfa: TaskDfa,
    gamma: float,
    tau: float,
    *,
    prune_unreachable: bool = False,
) -> ProductMdp:
    _validate_inputs(mdp, dfa, gamma, tau)
    live = coaccessible_modes(dfa)
    if len(live) != len(dfa.states):
        logger.warning(
            'Automato nao podado; modos mortos serao fixados em zero. modos=%s',
            sorted(set(dfa.states) - live),
        )

    labels = projected_labels(mdp, dfa)
    states: list[ProductState] = [(s, q) for q in dfa.states for s in mdp.states]
    index = {state: i for i, state in enumerate(states)}
    actions = mdp.actions
    action_index = {action: k for k, action in enumerate(actions)}

    rows: list[list[tuple[int, list[int], list[float]]]] = []
    rewards = np.zeros((len(states), len(actions)), dtype=float)
    for i, (s, q) in enumerate(states):
        if not mdp.actions_at(s):
            raise ProductError(f'Estado do MDP sem acoes disponiveis. estado={s}')
        row: list[tuple[int, list[int], list[float]]] = []
        for action in mdp.actions_at(s):
            a_idx = action_index[action]
            if q in dfa.accepting:
                row.append((a_idx, [i], [1.0]))
                continue
            targets: list[int] = []
            probs: list[float] = []
            for s_next, prob in mdp.transition[(s, action)].items():
                if prob <= 0:
                    continue
                q_next = step(dfa, q, labels[s_next])
                targets.append(index[(s_next, q_next)])
                probs.append(float(prob))
                if q_next in dfa.accepting:
                    rewards[i, a_idx] += prob
            row.append((a_idx, targets, probs))
        rows.append(row)

    initial = (mdp.initial, step(dfa, dfa.initial, labels[mdp.initial]))
    keep = list(range(len(states)))
    if prune_unreachable:
        keep = _reachable(rows, index[initial])
        logger.info('Produto podado por alcancabilidade. antes=%s depois=%s', len(states), len(keep))
    remap = {old: new for new, old in enumerate(keep)}

    row_actions, row_starts, row_targets, row_probs = [], [], [], []
    for old in keep:
        entries = rows[old]
        starts, offset = [], 0
        for _, targets, _ in entries:
            starts.append(offset)
            offset += len(targets)
        row_actions.append(np.array([a_idx for a_idx, _, _ in entries], dtype=np.int64))
        row_starts.append(np.array(starts, dtype=np.int64))
        row_targets.append(np.array([remap[t] for _, targets, _ in entries for t in targets], dtype=np.int64))
        row_probs.append(np.array([p for _, _, probs in entries for p in probs], dtype=float))

    kept_states = tuple(states[old] for old in keep)
    product = ProductMdp(
        mdp=mdp,
        dfa=dfa,
        states=kept_states,
        actions=actions,
        initial=initial,
        accepting=frozenset(remap[i] for i in keep if states[i][1] in dfa.accepting),
        dead=frozenset(remap[i] for i in keep if states[i][1] not in live),
        row_actions=tuple(row_actions),
        row_starts=tuple(row_starts),
        row_targets=tuple(row_targets),
        row_probs=tuple(row_probs),
        reward=rewards[keep].copy(),
        gamma=gamma,
        tau=tau,
    )
    logger.info(
        'Produto construido. estados=%s aceitacao=%s mortos=%s inicial=%s',
        product.size,
        len(product.accepting),
        len(product.dead),
        initial,
    )
    return product


def _reachable(rows: list[list[tuple[int, list[int], list[float]]]], start: int) -> list[int]:
    edges = [(i, t) for i, row in enumerate(rows) for _, successors, _ in row for t in successors]
    tails, heads = zip(*edges) if edges else ((), ())
    graph = csr_matrix((np.ones(len(edges)), (tails, heads)), shape=(len(rows), len(rows)))
    order = breadth_first_order(graph, start, directed=True, return_predecessors=False)
    return sorted(int(i) for i in order)


def product_reward(product: ProductMdp, state: ProductState, action: str) -> float:
    i = product.index_of(state)
    a_idx = product.action_index(action)
    if a_idx not in product.row_actions[i]:
        raise ProductError(f'Acao indisponivel. estado={state} acao={action}')
    return float(product.reward[i, a_idx])


def product_transition(product: ProductMdp, state: ProductState, action: str) -> dict[ProductState, float]:
    targets, probs = product.successors(product.index_of(state), product.action_index(action))
    return {product.states[int(t)]: float(p) for t, p in zip(targets, probs)}

