from fractions import Fraction

import pytest
from hypothesis import given, settings

from conftest import matrix_elements, weyl_elements
from weyl import (
    DimensionMismatchError,
    MatrixElement,
    SymplecticForm,
    WeylElement,
    bracket,
    moyal_mul,
    symbol,
    symplectic_pairs,
    truncate_to_weight,
    weight_components,
)


def test_symplectic_pairs_darboux():
    assert symplectic_pairs(1) == ((0, 1, 1), (1, 0, -1))
    omega = SymplecticForm(2)
    assert omega(0, 2) == 1
    assert omega(3, 1) == -1
    assert omega(0, 1) == 0


def test_star_of_coordinates(p, q, hbar):
    assert moyal_mul(p, q) == p.commutative_mul(q) + hbar.scale(Fraction(1, 2))
    assert moyal_mul(q, p) == p.commutative_mul(q) - hbar.scale(Fraction(1, 2))
    assert bracket(p, q) == WeylElement.one(2)


def test_star_of_squares(p, q, hbar):
    p2, q2 = p.commutative_mul(p), q.commutative_mul(q)
    expected = (
        p2.commutative_mul(q2)
        + p.commutative_mul(q).shift_hbar(1).scale(2)
        + WeylElement.constant(2, Fraction(1, 2), h=2)
    )
    assert moyal_mul(p2, q2) == expected


def test_constants_are_central(p):
    c = WeylElement.constant(2, 5, h=-1)
    assert bracket(c, p).is_zero()


def test_dimension_mismatch():
    with pytest.raises(DimensionMismatchError):
        moyal_mul(WeylElement.one(2), WeylElement.one(4))


def test_canonical_text(p, q):
    f = p.commutative_mul(p).scale(Fraction(3, 2)).shift_hbar(-1) - q
    assert str(f) == "3/2 h^-1 y1^2 - y2"
    assert str(WeylElement.zero(2)) == "0"
    assert str(-q) == "-1 y2"


def test_matrix_product_uses_matrix_order(p, q):
    Epq = MatrixElement.unit(2, 2, 0, 1, p)
    Eq = MatrixElement.unit(2, 2, 1, 0, q)
    product = moyal_mul(Epq, Eq)
    assert product.entries[0][0] == moyal_mul(p, q)
    assert product.entries[1][1].is_zero()


def test_symbol_and_truncation(p, hbar):
    f = p + hbar + WeylElement.one(2)
    assert symbol(f) == hbar + WeylElement.one(2)
    assert truncate_to_weight(f, 1) == p + WeylElement.one(2)


def test_min_hbar(p, hbar):
    assert (p.shift_hbar(-1) + hbar).min_hbar() == -1
    assert WeylElement.zero(2).min_hbar() is None


def test_weight_components(p, hbar):
    parts = weight_components(p + hbar)
    assert [w for w, _ in parts] == [1, 2]


@settings(max_examples=40, deadline=None)
@given(weyl_elements(), weyl_elements(), weyl_elements())
def test_associativity(f, g, h):
    assert moyal_mul(moyal_mul(f, g), h) == moyal_mul(f, moyal_mul(g, h))


@settings(max_examples=25, deadline=None)
@given(matrix_elements(), matrix_elements(), matrix_elements())
def test_matrix_associativity(f, g, h):
    assert moyal_mul(moyal_mul(f, g), h) == moyal_mul(f, moyal_mul(g, h))


@settings(max_examples=30, deadline=None)
@given(weyl_elements(max_degree=2), weyl_elements(max_degree=2), weyl_elements(max_degree=2))
def test_jacobi(f, g, h):
    total = bracket(f, bracket(g, h)) + bracket(g, bracket(h, f)) + bracket(h, bracket(f, g))
    assert total.is_zero()


@settings(max_examples=40, deadline=None)
@given(weyl_elements(), weyl_elements())
def test_star_respects_weight(f, g):
    product_weights = {w for w, _ in weight_components(moyal_mul(f, g))}
    possible = {a + b for a, _ in weight_components(f) for b, _ in weight_components(g)}
    assert product_weights <= possible


def test_matrix_constructors(p, q):
    assert MatrixElement.identity(2, 2) == MatrixElement.scalar(WeylElement.one(2), 2)
    M = MatrixElement.from_rows([[p, q], [q, p]])
    assert (M.dim, M.rank) == (2, 2)
    assert M.entries[0][1] == q
    with pytest.raises(DimensionMismatchError):
        MatrixElement.from_rows([])
