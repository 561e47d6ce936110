"""Readers for grid-world JSON files and the sparse MDP text format.

Sparse format, one declaration per line::

    states: s0 s1 s2
    actions: go stay
    initial: s0
    props: goal
    label s2: goal
    s0 go -> s1 0.5
    s0 go -> s2 0.5

An action is available at a state exactly when some row lists it.
"""

from __future__ import annotations

import logging
from pathlib import Path

from app.domain.entities.automaton import AtomicPropositionSet
from app.domain.entities.mdp import LabeledMdp
from app.domain.exceptions import MdpError
from app.domain.services.mdp_service import build_grid_world, validate_grid_spec, validate_mdp
from app.infrastructure.io.config_loader import load_grid_config

logger = logging.getLogger(__name__)


def load_grid_world(path: str | Path) -> LabeledMdp:
    spec = load_grid_config(path).to_spec()
    validate_grid_spec(spec)
    return build_grid_world(spec)


def _fail(message: str, line: int) -> MdpError:
    return MdpError(f'linha {line}: {message}')


def parse_sparse_mdp(text: str) -> LabeledMdp:
    states: list[str] = []
    actions: list[str] = []
    props: list[str] = []
    initial: str | None = None
    labels: dict[str, set[str]] = {}
    rows: dict[tuple[str, str], dict[str, float]] = {}

    for number, raw_line in enumerate(text.lstrip('﻿').splitlines(), start=1):
        line = raw_line.split('#', 1)[0].strip()
        if not line:
            continue
        if '->' in line:
            head, tail = (part.split() for part in line.split('->', 1))
            if len(head) != 2 or len(tail) != 2:
                raise _fail(f'Linha de transicao invalida. conteudo={line!r}', number)
            try:
                prob = float(tail[1])
            except ValueError as exc:
                raise _fail(f'Probabilidade invalida. valor={tail[1]!r}', number) from exc
            row = rows.setdefault((head[0], head[1]), {})
            row[tail[0]] = row.get(tail[0], 0.0) + prob
            continue
        key, _, value = line.partition(':')
        key = key.strip()
        values = value.replace(',', ' ').split()
        if key == 'states':
            states = values
        elif key == 'actions':
            actions = values
        elif key == 'props':
            props = values
        elif key == 'initial':
            if len(values) != 1:
                raise _fail('Estado inicial deve ser unico.', number)
            initial = values[0]
        elif key.startswith('label '):
            labels.setdefault(key[len('label '):].strip(), set()).update(values)
        else:
            raise _fail(f'Linha nao reconhecida. conteudo={line!r}', number)

    if not states or not actions or initial is None:
        raise MdpError('MDP esparso exige states, actions e initial.')
    known = set(states)
    for (state, action), row in rows.items():
        if state not in known or action not in actions:
            raise MdpError(f'Linha referencia estado ou acao desconhecida. estado={state} acao={action}')
        unknown = [target for target in row if target not in known]
        if unknown:
            raise MdpError(f'Sucessores desconhecidos. estado={state} acao={action} sucessores={unknown}')
    for state in labels:
        if state not in known:
            raise MdpError(f'Rotulo para estado desconhecido. estado={state}')

    available = {state: tuple(a for a in actions if (state, a) in rows) for state in states}
    mdp = LabeledMdp(
        states=tuple(states),
        actions=tuple(actions),
        initial=initial,
        transition=rows,
        props=AtomicPropositionSet.of(props),
        label={state: AtomicPropositionSet.of(items) for state, items in labels.items()},
        available=available,
    )
    violations = validate_mdp(mdp)
    if violations:
        raise MdpError(f'MDP esparso invalido. violacoes={violations[:5]}')
    return mdp


def load_sparse_mdp(path: str | Path) -> LabeledMdp:
    source = Path(path)
    try:
        text = source.read_text(encoding='utf-8')
    except OSError as exc:
        raise MdpError(f'Falha ao ler arquivo do MDP. caminho={source} motivo={exc}') from exc
    except UnicodeDecodeError as exc:
        raise MdpError(f'Arquivo do MDP nao esta em UTF-8. caminho={source} posicao={exc.start}') from exc
    mdp = parse_sparse_mdp(text)
    logger.info('MDP esparso carregado. caminho=%s estados=%s', source, len(mdp.states))
    return mdp
