from fractions import Fraction

import pytest

from configspace import (
    PropagatorPattern,
    SimplexPolynomial,
    bernoulli_wheel,
    pattern_integral,
    propagator_polynomial,
    simplex_monomial_integral,
    wheel_coefficient,
)

WHEEL_VALUES = {
    2: Fraction(-1, 12),
    3: Fraction(0),
    4: Fraction(1, 720),
    5: Fraction(0),
    6: Fraction(-1, 30240),
    7: Fraction(0),
    8: Fraction(1, 1209600),
}


def test_simplex_monomial_integrals():
    assert simplex_monomial_integral(0, ()) == 1
    assert simplex_monomial_integral(1, (1,)) == Fraction(1, 2)
    assert simplex_monomial_integral(2, (1, 1)) == Fraction(1, 24)
    assert simplex_monomial_integral(2, ()) == Fraction(1, 2)


def test_simplex_monomial_errors():
    with pytest.raises(ValueError):
        simplex_monomial_integral(1, (-1,))
    with pytest.raises(ValueError):
        simplex_monomial_integral(1, (1, 1, 1))


def test_propagator_is_antisymmetric():
    for m in (1, 2, 3):
        for alpha in range(m + 1):
            for beta in range(m + 1):
                if alpha != beta:
                    total = propagator_polynomial(m, alpha, beta) + propagator_polynomial(m, beta, alpha)
                    assert total == SimplexPolynomial.constant(m, 0)


def test_single_propagator_integrates_to_zero():
    assert pattern_integral(PropagatorPattern(1, ((0, 1),))) == 0


def test_two_point_loop():
    assert pattern_integral(PropagatorPattern(1, ((0, 1), (1, 0)))) == Fraction(-1, 12)


def test_pattern_rejects_loops():
    with pytest.raises(ValueError):
        PropagatorPattern(2, ((1, 1),))


def test_pattern_integral_cyclic_relabeling():
    edges = ((0, 1), (1, 2), (0, 2))
    rotated = tuple(((a + 1) % 3, (b + 1) % 3) for a, b in edges)
    assert pattern_integral(PropagatorPattern(2, edges)) == pattern_integral(PropagatorPattern(2, rotated))


@pytest.mark.parametrize("k", sorted(WHEEL_VALUES))
def test_wheel_coefficients(k):
    assert wheel_coefficient(k) == WHEEL_VALUES[k]
    assert bernoulli_wheel(k) == WHEEL_VALUES[k]


@pytest.mark.parametrize("k", [2, 3, 4])
def test_wheel_by_patterns(k):
    assert wheel_coefficient(k, method="patterns") == WHEEL_VALUES[k]


def test_wheel_errors():
    with pytest.raises(ValueError):
        wheel_coefficient(1)
    with pytest.raises(ValueError):
        wheel_coefficient(2, method="graphs")


@pytest.mark.parametrize("m, edges", [
    (1, ((0, 1),)),
    (1, ((0, 1), (1, 0))),
    (2, ((0, 1), (1, 2), (2, 0))),
    (2, ((0, 2), (0, 2), (1, 0))),
    (3, ((0, 3), (1, 2), (2, 3), (3, 1))),
])
def test_reversing_edges_flips_sign_per_edge(m, edges):
    reversed_edges = tuple((beta, alpha) for alpha, beta in edges)
    forward = pattern_integral(PropagatorPattern(m, edges))
    backward = pattern_integral(PropagatorPattern(m, reversed_edges))
    assert backward == (-1) ** len(edges) * forward
