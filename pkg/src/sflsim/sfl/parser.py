"""Recursive-descent parser for SFL.

Precedence, tightest first: ``^`` (right-associative), unary ``-``/``+``,
``*`` ``/``, ``+`` ``-``, comparisons, and the column-vector separator ``|``.
Unary minus binds looser than ``^``, so ``-2^2`` is ``-4``.
"""

from __future__ import annotations

import itertools
from collections.abc import Iterator
from dataclasses import dataclass

import sflsim.interactions  # noqa: F401  (registers interaction operators)
from sflsim.errors import SflSyntaxError
from sflsim.sfl import functions
from sflsim.sfl.keywords import looks_like_kernel_keyword
from sflsim.sfl.nodes import BinaryOp, ExpressionNode, FunctionCall, KernelKeywordNode, Literal, SymbolRef, UnaryOp
from sflsim.sfl.tokenizer import (
    ASSIGN,
    COLON,
    COMMA,
    COMPARE,
    IDENT,
    LPAREN,
    NUMBER,
    OP,
    PIPE,
    RPAREN,
    Token,
    tokenize,
)


@dataclass(frozen=True)
class Statement:
    """``target = expression`` (or ``target: expression``); target is None for a bare expression."""

    target: str | None
    expression: ExpressionNode


class Parser:
    def __init__(self, tokens: list[Token], source: str = "", serials: Iterator[int] | None = None) -> None:
        self.tokens = tokens
        self.source = source
        self.pos = 0
        self.serials = serials if serials is not None else itertools.count()

    def _peek(self, offset: int = 0) -> Token | None:
        index = self.pos + offset
        return self.tokens[index] if index < len(self.tokens) else None

    def _at(self, kind: str, text: str | None = None) -> bool:
        token = self._peek()
        return token is not None and token.kind == kind and (text is None or token.text == text)

    def _advance(self) -> Token:
        token = self._peek()
        if token is None:
            raise self._error("unexpected end of expression")
        self.pos += 1
        return token

    def _expect(self, kind: str, what: str) -> Token:
        if not self._at(kind):
            raise self._error(f"expected {what}")
        return self._advance()

    def _error(self, message: str) -> SflSyntaxError:
        token = self._peek()
        column = token.column if token is not None else len(self.source)
        if token is not None:
            message = f"{message}, found {token.text!r}"
        return SflSyntaxError(message, source=self.source, column=column)

    def parse_statement(self) -> Statement:
        target = None
        first, second = self._peek(), self._peek(1)
        if first is not None and first.kind == IDENT and second is not None and second.kind in (ASSIGN, COLON):
            target = first.text
            self.pos += 2
        expression = self.parse_expression()
        return Statement(target=target, expression=expression)

    def parse_expression(self) -> ExpressionNode:
        if not self.tokens:
            raise SflSyntaxError("empty expression", source=self.source, column=0)
        node = self._concat()
        if self._peek() is not None:
            raise self._error("unexpected token")
        return node

    def _concat(self) -> ExpressionNode:
        node = self._comparison()
        while self._at(PIPE):
            self._advance()
            node = BinaryOp("|", node, self._comparison())
        return node

    def _comparison(self) -> ExpressionNode:
        node = self._additive()
        while self._at(COMPARE):
            op = self._advance().text
            node = BinaryOp(op, node, self._additive())
        return node

    def _additive(self) -> ExpressionNode:
        node = self._term()
        while self._at(OP, "+") or self._at(OP, "-"):
            op = self._advance().text
            node = BinaryOp(op, node, self._term())
        return node

    def _term(self) -> ExpressionNode:
        node = self._unary()
        while self._at(OP, "*") or self._at(OP, "/"):
            op = self._advance().text
            node = BinaryOp(op, node, self._unary())
        return node

    def _unary(self) -> ExpressionNode:
        if self._at(OP, "-") or self._at(OP, "+"):
            op = self._advance().text
            return UnaryOp(op, self._unary())
        return self._power()

    def _power(self) -> ExpressionNode:
        base = self._primary()
        if self._at(OP, "^"):
            self._advance()
            return BinaryOp("^", base, self._unary())
        return base

    def _primary(self) -> ExpressionNode:
        token = self._peek()
        if token is None:
            raise self._error("unexpected end of expression")
        if token.kind == NUMBER:
            self._advance()
            return Literal(float(token.text))
        if token.kind == IDENT:
            self._advance()
            if self._at(LPAREN):
                return self._call(token)
            if looks_like_kernel_keyword(token.text):
                return KernelKeywordNode(token.text)
            return SymbolRef(token.text)
        if token.kind == LPAREN:
            self._advance()
            node = self._concat()
            self._expect(RPAREN, "')'")
            return node
        raise self._error("expected a number, name or '('")

    def _call(self, name_token: Token) -> FunctionCall:
        spec = functions.lookup(name_token.text)
        if spec is None:
            raise SflSyntaxError(
                f"unknown function '{name_token.text}'", source=self.source, column=name_token.column
            )
        self._expect(LPAREN, "'('")
        args: list[ExpressionNode] = []
        if not self._at(RPAREN):
            args.append(self._concat())
            while self._at(COMMA):
                self._advance()
                args.append(self._concat())
        self._expect(RPAREN, "')' or ','")
        if not spec.accepts(len(args)):
            raise SflSyntaxError(
                f"function '{spec.name}' takes {spec.arity_text()} arguments, got {len(args)}",
                source=self.source,
                column=name_token.column,
            )
        return FunctionCall(spec.name, tuple(args), spec=spec, serial=next(self.serials))


def parse(tokens: list[Token], source: str = "", serials: Iterator[int] | None = None) -> ExpressionNode:
    return Parser(tokens, source, serials).parse_expression()


def parse_expression(source: str, serials: Iterator[int] | None = None) -> ExpressionNode:
    return parse(tokenize(source), source, serials)


def parse_statement(source: str, serials: Iterator[int] | None = None) -> Statement:
    parser = Parser(tokenize(source), source, serials)
    if not parser.tokens:
        raise SflSyntaxError("empty statement", source=source, column=0)
    return parser.parse_statement()
