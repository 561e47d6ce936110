from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Union

from app.domain.entities.automaton import AtomicPropositionSet
from app.domain.exceptions import DfaParseError

_TOKEN_RE = re.compile(r'\s*(?:(?P<op>&&|\|\||[!¬~&∧|∨()])|(?P<ident>[A-Za-z_][A-Za-z0-9_]*))')

_OPERATOR_ALIASES = {'¬': '!', '~': '!', '∧': '&', '&&': '&', '∨': '|', '||': '|'}


@dataclass(frozen=True, slots=True)
class Const:
    value: bool


@dataclass(frozen=True, slots=True)
class Prop:
    name: str


@dataclass(frozen=True, slots=True)
class Not:
    operand: 'Guard'


@dataclass(frozen=True, slots=True)
class And:
    left: 'Guard'
    right: 'Guard'


@dataclass(frozen=True, slots=True)
class Or:
    left: 'Guard'
    right: 'Guard'


Guard = Union[Const, Prop, Not, And, Or]


def _tokenize(text: str, line: int | None) -> list[str]:
    tokens: list[str] = []
    position = 0
    stripped = text.rstrip()
    while position < len(stripped):
        match = _TOKEN_RE.match(stripped, position)
        if match is None or match.end() == position:
            raise DfaParseError(f'Simbolo inesperado na guarda. posicao={position} guarda={text!r}', line)
        token = match.group('op') or match.group('ident')
        tokens.append(_OPERATOR_ALIASES.get(token, token))
        position = match.end()
    return tokens


class _Parser:
    def __init__(self, tokens: list[str], text: str, line: int | None) -> None:
        self.tokens = tokens
        self.text = text
        self.line = line
        self.position = 0

    def _peek(self) -> str | None:
        return self.tokens[self.position] if self.position < len(self.tokens) else None

    def _take(self) -> str:
        token = self._peek()
        if token is None:
            raise DfaParseError(f'Guarda incompleta. guarda={self.text!r}', self.line)
        self.position += 1
        return token

    def parse(self) -> Guard:
        node = self._or()
        if self._peek() is not None:
            raise DfaParseError(f'Simbolo sobrando na guarda. simbolo={self._peek()} guarda={self.text!r}', self.line)
        return node

    def _or(self) -> Guard:
        node = self._and()
        while self._peek() == '|':
            self._take()
            node = Or(node, self._and())
        return node

    def _and(self) -> Guard:
        node = self._unary()
        while self._peek() == '&':
            self._take()
            node = And(node, self._unary())
        return node

    def _unary(self) -> Guard:
        token = self._take()
        if token == '!':
            return Not(self._unary())
        if token == '(':
            node = self._or()
            if self._take() != ')':
                raise DfaParseError(f'Parentese nao fechado. guarda={self.text!r}', self.line)
            return node
        if token in {'&', '|', ')'}:
            raise DfaParseError(f'Operador fora de lugar. simbolo={token} guarda={self.text!r}', self.line)
        lowered = token.lower()
        if lowered == 'true':
            return Const(True)
        if lowered == 'false':
            return Const(False)
        return Prop(token)


def parse_guard(text: str, line: int | None = None) -> Guard:
    tokens = _tokenize(text, line)
    if not tokens:
        raise DfaParseError('Guarda vazia.', line)
    return _Parser(tokens, text, line).parse()


def guard_props(node: Guard) -> set[str]:
    if isinstance(node, Prop):
        return {node.name}
    if isinstance(node, Const):
        return set()
    if isinstance(node, Not):
        return guard_props(node.operand)
    return guard_props(node.left) | guard_props(node.right)


def evaluate_guard(node: Guard, symbol: AtomicPropositionSet) -> bool:
    if isinstance(node, Const):
        return node.value
    if isinstance(node, Prop):
        return node.name in symbol
    if isinstance(node, Not):
        return not evaluate_guard(node.operand, symbol)
    if isinstance(node, And):
        return evaluate_guard(node.left, symbol) and evaluate_guard(node.right, symbol)
    return evaluate_guard(node.left, symbol) or evaluate_guard(node.right, symbol)
