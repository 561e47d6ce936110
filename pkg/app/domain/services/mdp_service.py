from __future__ import annotations

import logging
import math

from app.domain.entities.automaton import AtomicPropositionSet
from app.domain.entities.mdp import GRID_ACTIONS, GRID_MOVES, Cell, GridWorldSpec, LabeledMdp, State
from app.domain.exceptions import MdpError

logger = logging.getLogger(__name__)

PROBABILITY_TOLERANCE = 1e-9


def validate_grid_spec(spec: GridWorldSpec) -> None:
    if spec.width <= 0 or spec.height <= 0:
        raise MdpError(f'Dimensoes invalidas. largura={spec.width} altura={spec.height}')
    if spec.noise < 0 or spec.noise * (len(GRID_ACTIONS) - 1) > 1:
        raise MdpError(f'Ruido invalido. ruido={spec.noise}')
    for name, cells in spec.regions.items():
        outside = sorted(cell for cell in cells if not spec.contains(cell))
        if outside:
            raise MdpError(f'Regiao fora da grade. regiao={name} celulas={outside}')
    outside = sorted(cell for cell in spec.obstacles if not spec.contains(cell))
    if outside:
        raise MdpError(f'Obstaculo fora da grade. celulas={outside}')
    if not spec.contains(spec.initial_cell):
        raise MdpError(f'Celula inicial fora da grade. celula={spec.initial_cell}')
    if spec.initial_cell in spec.obstacles:
        raise MdpError(f'Celula inicial e obstaculo. celula={spec.initial_cell}')
    for wall in spec.walls:
        cells = sorted(wall)
        if len(cells) != 2 or not all(spec.contains(cell) for cell in cells):
            raise MdpError(f'Parede invalida. celulas={cells}')
        (x1, y1), (x2, y2) = cells
        if abs(x1 - x2) + abs(y1 - y2) != 1:
            raise MdpError(f'Parede entre celulas nao adjacentes. celulas={cells}')


def _move(spec: GridWorldSpec, cell: Cell, action: str) -> Cell:
    dx, dy = GRID_MOVES[action]
    target = (cell[0] + dx, cell[1] + dy)
    if not spec.contains(target) or frozenset((cell, target)) in spec.walls:
        return cell
    return target


def grid_distribution(spec: GridWorldSpec, cell: Cell, action: str) -> dict[Cell, float]:
    if cell in spec.obstacles:
        return {cell: 1.0}
    intended = _move(spec, cell, action)
    wrong = {_move(spec, cell, other) for other in GRID_ACTIONS if other != action} - {intended}
    distribution = {intended: 1.0 - spec.noise * len(wrong)}
    for target in sorted(wrong):
        distribution[target] = spec.noise
    return {target: prob for target, prob in distribution.items() if prob > 0}


def build_grid_world(spec: GridWorldSpec) -> LabeledMdp:
    validate_grid_spec(spec)
    cells = spec.cells()
    transition = {(cell, action): grid_distribution(spec, cell, action) for cell in cells for action in GRID_ACTIONS}

    props = set(spec.regions)
    if spec.obstacles:
        props.add(spec.obstacle_prop)
    label: dict[State, AtomicPropositionSet] = {}
    for cell in cells:
        names = [name for name, region in spec.regions.items() if cell in region]
        if cell in spec.obstacles:
            names.append(spec.obstacle_prop)
        label[cell] = AtomicPropositionSet.of(names)

    logger.info(
        'Grade construida. largura=%s altura=%s ruido=%s obstaculos=%s',
        spec.width,
        spec.height,
        spec.noise,
        len(spec.obstacles),
    )
    return LabeledMdp(
        states=cells,
        actions=GRID_ACTIONS,
        initial=spec.initial_cell,
        transition=transition,
        props=AtomicPropositionSet.of(props),
        label=label,
        grid_size=(spec.width, spec.height),
    )


def validate_mdp(mdp: LabeledMdp) -> list[str]:
    violations: list[str] = []
    for state in mdp.states:
        for action in mdp.actions_at(state):
            row = mdp.transition.get((state, action))
            if row is None:
                violations.append(f'Linha de transicao ausente. estado={state} acao={action}')
                continue
            if any(prob < 0 for prob in row.values()):
                violations.append(f'Probabilidade negativa. estado={state} acao={action}')
            unknown = [target for target in row if not mdp.has_state(target)]
            if unknown:
                violations.append(f'Sucessor desconhecido. estado={state} acao={action} sucessores={unknown}')
            total = math.fsum(row.values())
            if abs(total - 1.0) > PROBABILITY_TOLERANCE:
                violations.append(f'Linha nao soma 1. estado={state} acao={action} soma={total:.12f}')
        extra = set(mdp.label_of(state).props) - set(mdp.props.props)
        if extra:
            violations.append(f'Rotulo com proposicao desconhecida. estado={state} proposicoes={sorted(extra)}')
    return violations


def transition_distribution(mdp: LabeledMdp, state: State, action: str) -> dict[State, float]:
    if not mdp.has_state(state):
        raise MdpError(f'Estado desconhecido. estado={state}')
    if action not in mdp.actions_at(state):
        raise MdpError(f'Acao indisponivel. estado={state} acao={action}')
    return {target: prob for target, prob in mdp.transition[(state, action)].items() if prob > 0}


def scale_grid_spec(spec: GridWorldSpec, factor: int) -> GridWorldSpec:
    """Blow every cell up into a ``factor`` x ``factor`` block."""
    if factor < 1:
        raise MdpError(f'Fator de escala invalido. fator={factor}')

    def block(cell: Cell) -> set[Cell]:
        return {(cell[0] * factor + i, cell[1] * factor + j) for i in range(factor) for j in range(factor)}

    walls: set[frozenset[Cell]] = set()
    for wall in spec.walls:
        (x1, y1), (x2, y2) = sorted(wall)
        for k in range(factor):
            if x1 != x2:
                left = (x1 * factor + factor - 1, y1 * factor + k)
                walls.add(frozenset((left, (left[0] + 1, left[1]))))
            else:
                below = (x1 * factor + k, y1 * factor + factor - 1)
                walls.add(frozenset((below, (below[0], below[1] + 1))))

    return GridWorldSpec(
        width=spec.width * factor,
        height=spec.height * factor,
        noise=spec.noise,
        regions={name: frozenset(c for cell in cells for c in block(cell)) for name, cells in spec.regions.items()},
        obstacles=frozenset(c for cell in spec.obstacles for c in block(cell)),
        walls=frozenset(walls),
        initial_cell=(spec.initial_cell[0] * factor, spec.initial_cell[1] * factor),
        obstacle_prop=spec.obstacle_prop,
    )


def reflect_cell(spec: GridWorldSpec, cell: Cell) -> Cell:
    return (spec.width - 1 - cell[0], cell[1])


def reflect_grid_spec(spec: GridWorldSpec) -> GridWorldSpec:
    """Left-right mirror image of a grid world."""
    return GridWorldSpec(
        width=spec.width,
        height=spec.height,
        noise=spec.noise,
        regions={name: frozenset(reflect_cell(spec, cell) for cell in cells) for name, cells in spec.regions.items()},
        obstacles=frozenset(reflect_cell(spec, cell) for cell in spec.obstacles),
        walls=frozenset(frozenset(reflect_cell(spec, cell) for cell in wall) for wall in spec.walls),
        initial_cell=reflect_cell(spec, spec.initial_cell),
        obstacle_prop=spec.obstacle_prop,
    )
