"""Tokenizer for SFL expressions and bindings."""

from __future__ import annotations

import re
from dataclasses import dataclass

from sflsim.errors import SflSyntaxError

NUMBER = "NUMBER"
IDENT = "IDENT"
OP = "OP"
COMPARE = "COMPARE"
ASSIGN = "ASSIGN"
COLON = "COLON"
PIPE = "PIPE"
LPAREN = "LPAREN"
RPAREN = "RPAREN"
COMMA = "COMMA"

_TOKEN_RE = re.compile(
    r"""
    (?P<space>\s+)
  | (?P<NUMBER>(?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?)
  | (?P<IDENT>[A-Za-z_][A-Za-z0-9_]*)
  | (?P<COMPARE><=|>=|==|!=|<|>)
  | (?P<ASSIGN>=)
  | (?P<OP>[-+*/^])
  | (?P<COLON>:)
  | (?P<PIPE>\|)
  | (?P<LPAREN>\()
  | (?P<RPAREN>\))
  | (?P<COMMA>,)
    """,
    re.VERBOSE,
)


@dataclass(frozen=True)
class Token:
    kind: str
    text: str
    column: int


def tokenize(source: str) -> list[Token]:
    """Split SFL source text into tokens; raise on the first illegal character."""
    tokens: list[Token] = []
    pos = 0
    while pos < len(source):
        match = _TOKEN_RE.match(source, pos)
        if match is None:
            raise SflSyntaxError(f"illegal character {source[pos]!r}", source=source, column=pos)
        kind = match.lastgroup
        if kind != "space":
            tokens.append(Token(kind=str(kind), text=match.group(), column=pos))
        pos = match.end()
    return tokens
