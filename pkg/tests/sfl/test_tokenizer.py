from __future__ import annotations

import pytest

from sflsim.errors import SflSyntaxError
from sflsim.sfl.tokenizer import ASSIGN, COMPARE, IDENT, NUMBER, OP, PIPE, tokenize


def test_tokenize_equation_with_vector_and_exponent_literal() -> None:
    tokens = tokenize("v = v + dt*(0|-9.81e0)")

    assert [t.kind for t in tokens[:4]] == [IDENT, ASSIGN, IDENT, OP]
    assert [t.text for t in tokens if t.kind == NUMBER] == ["0", "9.81e0"]
    assert any(t.kind == PIPE for t in tokens)


def test_two_character_comparisons_are_single_tokens() -> None:
    tokens = tokenize("a<=b != c")

    assert [t.text for t in tokens if t.kind == COMPARE] == ["<=", "!="]


def test_token_columns_are_zero_based() -> None:
    tokens = tokenize("  rho0 * 2")

    assert tokens[0].column == 2
    assert tokens[1].column == 7


def test_illegal_character_reports_column() -> None:
    with pytest.raises(SflSyntaxError, match=r"illegal character '\$' at column 2") as excinfo:
        tokenize("a $ b")

    assert excinfo.value.column == 2


def test_kernel_keyword_is_an_identifier() -> None:
    (token,) = tokenize("Wp52220")

    assert token.kind == IDENT
