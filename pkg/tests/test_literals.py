from fractions import Fraction

import pytest

from cyclic import TensorChain
from forms import FormElement
from literals import LiteralDimensionError, LiteralSyntaxError, format_literal, parse_literal, tokenize
from weyl import MatrixElement, WeylElement


def test_tokenize_kinds():
    kinds = [token.kind for token in tokenize("3/2 h^-1 y1^2 dy2")]
    assert kinds == ["number", "hbar", "y", "dy", "end"]


def test_parse_form_term():
    value = parse_literal("3/2 h^-1 y1^2 dy2", 1)
    assert value == FormElement(2, {((2, 0), -1, (1,), 0): Fraction(3, 2)})


def test_parse_signed_sum():
    value = parse_literal("1 + -1/2 h^1", 1)
    assert value == WeylElement.one(2) - WeylElement.constant(2, Fraction(1, 2), h=1)


def test_dy_order_gives_sign():
    assert parse_literal("dy2 dy1", 1) == -parse_literal("dy1 dy2", 1)
    assert parse_literal("dy1 dy1", 1).is_zero()


def test_parse_chain(p, q):
    value = parse_literal("chain [ mat 1 [[y1]] ; mat 1 [[y2]] ]", 1)
    assert value == TensorChain.from_entries([p, q])


def test_parse_chain_sum(p, q):
    value = parse_literal("chain [ y1 ; y2 ] - 2 h^1 u^1 chain [ y2 ; y1 ]", 1)
    expected = TensorChain.from_entries([p, q]) - TensorChain.from_entries([q, p], coefficient=2, h=1, u=1)
    assert value == expected


def test_parse_matrix_and_args(p, q):
    M = parse_literal("mat 2 [[y1, 0], [0, y2]]", 1, rank=2)
    assert M == MatrixElement(2, 2, [[p, WeylElement.zero(2)], [WeylElement.zero(2), q]])
    args = parse_literal("args [ y1 ; h^1 y2 ]", 1)
    assert args == [MatrixElement.scalar(p, 1), MatrixElement.scalar(q.shift_hbar(1), 1)]
    assert parse_literal("args [ ]", 1) == []


def test_syntax_error_position():
    with pytest.raises(LiteralSyntaxError) as info:
        parse_literal("y1 +\n  y2 $", 1)
    assert (info.value.line, info.value.column) == (2, 6)


@pytest.mark.parametrize("text", ["3/0 y1", "chain [ y1 ] + 1/0 chain [ y2 ]"])
def test_zero_denominator(text):
    with pytest.raises(LiteralSyntaxError) as info:
        parse_literal(text, 1)
    assert "zero denominator" in str(info.value)
    assert info.value.line == 1


def test_missing_bracket():
    with pytest.raises(LiteralSyntaxError):
        parse_literal("chain [ y1 ; y2", 1)


def test_index_out_of_range():
    with pytest.raises(LiteralDimensionError):
        parse_literal("y3", 1)


def test_rank_clash():
    with pytest.raises(LiteralDimensionError):
        parse_literal("mat 2 [[1, 0], [0, 1]]", 1, rank=1)


def test_matrix_shape_checked():
    with pytest.raises(LiteralSyntaxError):
        parse_literal("mat 2 [[1, 0]]", 1, rank=2)


@pytest.mark.parametrize("text", [
    "3/2 h^-1 y1^2 dy2",
    "y1 y2 + 1/2 h^1",
    "-1 y2 + u^1 dy1 dy2",
    "mat 2 [[y1, 0], [h^1, -1/3 y2^2]]",
    "chain [ y1 ; y2 ] - 2 h^1 u^1 chain [ y2 ; y1 ]",
    "args [ y1 ; y2 ]",
])
def test_canonical_round_trip(text):
    rank = 2 if text.startswith("mat 2") else 1
    value = parse_literal(text, 1, rank=rank)
    assert parse_literal(format_literal(value), 1, rank=rank) == value
