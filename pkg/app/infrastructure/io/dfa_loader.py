"""Reader for the task automaton text format.

    # comment
    props: a, b, c, d, goal
    states: q1, q2, q3, q4, q5
    initial: q1
    accepting: q5
    default: self-loop
    q1 --[a]--> q2
    q1 --[b & !a]--> q3

Guards use ``!``/``¬``/``~``, ``&``/``∧``/``&&``, ``|``/``∨``/``||``,
parentheses and the constants ``true``/``false``.
"""

from __future__ import annotations

import logging
import re
from pathlib import Path

from app.domain.entities.automaton import TaskDfa
from app.domain.exceptions import DfaParseError
from app.domain.services.automata_service import GuardRule, build_dfa, rule

logger = logging.getLogger(__name__)

_HEADER_RE = re.compile(r'^(?P<key>[A-Za-z_]+)\s*:\s*(?P<value>.*)$')
_RULE_RE = re.compile(r'^(?P<source>[^\s\-\[]+)\s*--\[(?P<guard>.*)\]-->\s*(?P<target>\S+)$')
_NAME_RE = re.compile(r'^[A-Za-z_][A-Za-z0-9_]*$')
_HEADER_KEYS = ('props', 'states', 'initial', 'accepting', 'default')


def _names(value: str, line: int) -> list[str]:
    items = [item.strip() for item in value.split(',') if item.strip()]
    for item in items:
        if _NAME_RE.fullmatch(item) is None:
            raise DfaParseError(f'Identificador invalido. valor={item!r}', line)
    if len(set(items)) != len(items):
        raise DfaParseError('Identificadores repetidos.', line)
    return items


def parse_dfa(text: str) -> TaskDfa:
    headers: dict[str, tuple[str, int]] = {}
    rules: list[GuardRule] = []
    for number, raw_line in enumerate(text.lstrip('﻿').splitlines(), start=1):
        line = raw_line.split('#', 1)[0].strip()
        if not line:
            continue
        match = _RULE_RE.match(line)
        if match is not None:
            rules.append(rule(match['source'], match['guard'], match['target'], number))
            continue
        match = _HEADER_RE.match(line)
        if match is None:
            raise DfaParseError(f'Linha nao reconhecida. conteudo={line!r}', number)
        key = match['key'].lower()
        if key not in _HEADER_KEYS:
            raise DfaParseError(f'Chave desconhecida. chave={key}', number)
        if key in headers:
            raise DfaParseError(f'Chave repetida. chave={key}', number)
        headers[key] = (match['value'].strip(), number)

    for key in ('props', 'states', 'initial', 'accepting'):
        if key not in headers:
            raise DfaParseError(f'Chave obrigatoria ausente. chave={key}')

    props = _names(*headers['props']) if headers['props'][0] else []
    states = _names(*headers['states'])
    if not states:
        raise DfaParseError('Automato sem modos.', headers['states'][1])
    initial = headers['initial'][0]
    if initial not in states:
        raise DfaParseError(f'Modo inicial desconhecido. modo={initial}', headers['initial'][1])
    accepting = _names(*headers['accepting'])
    if not accepting:
        raise DfaParseError('Conjunto de aceitacao vazio.', headers['accepting'][1])
    unknown = [mode for mode in accepting if mode not in states]
    if unknown:
        raise DfaParseError(f'Modos de aceitacao desconhecidos. modos={unknown}', headers['accepting'][1])

    default_self_loop = False
    if 'default' in headers:
        value, number = headers['default']
        if value.lower() not in ('self-loop', 'none'):
            raise DfaParseError(f'Regra padrao desconhecida. valor={value!r}', number)
        default_self_loop = value.lower() == 'self-loop'

    dfa = build_dfa(
        props=props,
        states=states,
        initial=initial,
        accepting=accepting,
        rules=rules,
        default_self_loop=default_self_loop,
    )
    logger.debug('Automato lido. modos=%s proposicoes=%s regras=%s', len(states), len(props), len(rules))
    return dfa


def load_dfa(path: str | Path) -> TaskDfa:
    source = Path(path)
    try:
        text = source.read_text(encoding='utf-8')
    except OSError as exc:
        raise DfaParseError(f'Falha ao ler arquivo do automato. caminho={source} motivo={exc}') from exc
    except UnicodeDecodeError as exc:
        raise DfaParseError(f'Arquivo do automato nao esta em UTF-8. caminho={source} posicao={exc.start}') from exc
    dfa = parse_dfa(text)
    logger.info('Automato carregado. caminho=%s modos=%s', source, len(dfa.states))
    return dfa
