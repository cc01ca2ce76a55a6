import logging
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from itertools import permutations
from math import factorial

import sympy

from weyl import accumulate

logger = logging.getLogger(__name__)


def _to_fraction(value):
    value = sympy.Rational(value)
    return Fraction(int(value.p), int(value.q))


def simplex_monomial_integral(m, exponents):
    """
    Dirichlet integral of prod lambda_i^{a_i} over the standard m-simplex.

    Missing trailing exponents count as 0.

    Args:
        m (int): Simplex dimension
        exponents (tuple): At most m+1 nonnegative exponents

    Returns:
        Fraction: (prod a_i!) / (m + sum a_i)!
    """
    if m < 0:
        raise ValueError(f"simplex dimension must be nonnegative, got {m}")
    if len(exponents) > m + 1:
        raise ValueError(f"{len(exponents)} exponents given for a {m}-simplex")
    if any(a < 0 for a in exponents):
        raise ValueError(f"negative exponent in {exponents}")
    numerator = 1
    for a in exponents:
        numerator *= factorial(a)
    return Fraction(numerator, factorial(m + sum(exponents)))


class SimplexPolynomial:
    """
    Polynomial in the gap coordinates of m+1 cyclically ordered points.

    Only the first m gaps lambda_s = u_{s,s+1} are stored; the last gap
    u_{m,0} = 1 - sum lambda_s is eliminated.
    """
    __slots__ = ("m", "terms")

    def __init__(self, m, terms=None):
        self.m = m
        clean = {}
        for exps, coef in (terms or {}).items():
            accumulate(clean, tuple(exps), Fraction(coef))
        self.terms = clean

    @classmethod
    def constant(cls, m, value):
        return cls(m, {(0,) * m: value})

    @classmethod
    def gap(cls, m, s):
        return cls(m, {tuple(1 if i == s else 0 for i in range(m)): 1})

    def __add__(self, other):
        terms = dict(self.terms)
        for exps, coef in other.terms.items():
            accumulate(terms, exps, coef)
        return SimplexPolynomial(self.m, terms)

    def __neg__(self):
        return SimplexPolynomial(self.m, {exps: -coef for exps, coef in self.terms.items()})

    def __sub__(self, other):
        return self + (-other)

    def __mul__(self, other):
        if isinstance(other, (int, Fraction)):
            return SimplexPolynomial(self.m, {exps: coef * other for exps, coef in self.terms.items()})
        terms = {}
        for a, ca in self.terms.items():
            for b, cb in other.terms.items():
                accumulate(terms, tuple(x + y for x, y in zip(a, b)), ca * cb)
        return SimplexPolynomial(self.m, terms)

    def __eq__(self, other):
        if not isinstance(other, SimplexPolynomial):
            return NotImplemented
        return self.m == other.m and self.terms == other.terms

    def __hash__(self):
        return hash((self.m, frozenset(self.terms.items())))

    def integrate(self):
        return sum(
            (coef * simplex_monomial_integral(self.m, exps) for exps, coef in self.terms.items()),
            Fraction(0),
        )

    def __str__(self):
        parts = []
        for exps, coef in sorted(self.terms.items()):
            factors = [f"u{s}{s + 1}" + (f"^{e}" if e > 1 else "") for s, e in enumerate(exps) if e]
            parts.append(" ".join([str(coef)] + factors))
        return " + ".join(parts) if parts else "0"


def propagator_polynomial(m, alpha, beta):
    """
    The propagator P = (anticlockwise distance from alpha to beta) - 1/2.

    Args:
        m (int): Points are 0..m
        alpha (int): Source point
        beta (int): Target point

    Returns:
        SimplexPolynomial: P_{alpha beta} in gap coordinates
    """
    if alpha == beta:
        raise ValueError(f"propagator is undefined on the diagonal ({alpha}, {beta})")
    if not (0 <= alpha <= m and 0 <= beta <= m):
        raise ValueError(f"points ({alpha}, {beta}) outside 0..{m}")
    low, high = min(alpha, beta), max(alpha, beta)
    distance = SimplexPolynomial(m)
    for s in range(low, high):
        distance = distance + SimplexPolynomial.gap(m, s)
    half = SimplexPolynomial.constant(m, Fraction(1, 2))
    if alpha < beta:
        return distance - half
    return half - distance


@dataclass(frozen=True)
class PropagatorPattern:
    """Propagator edges among m+1 cyclically ordered points."""
    m: int
    edges: tuple

    def __post_init__(self):
        for alpha, beta in self.edges:
            if alpha == beta or not (0 <= alpha <= self.m and 0 <= beta <= self.m):
                raise ValueError(f"bad edge ({alpha}, {beta}) for {self.m + 1} points")

    def canonical(self):
        return PropagatorPattern(self.m, tuple(sorted(self.edges)))


@lru_cache(maxsize=None)
def _pattern_integral(m, edges):
    integrand = SimplexPolynomial.constant(m, 1)
    for alpha, beta in edges:
        integrand = integrand * propagator_polynomial(m, alpha, beta)
    return integrand.integrate()


def pattern_integral(pattern):
    """Exact integral of the product of the pattern's propagators over the simplex."""
    canonical = pattern.canonical()
    return _pattern_integral(canonical.m, canonical.edges)


_x, _s = sympy.symbols("x s")
_SAWTOOTH = _x - sympy.Rational(1, 2)


def _circle_convolve(g, f):
    # both are polynomials in x on [0, 1), extended periodically
    inside = sympy.integrate(g.subs(_x, _s) * f.subs(_x, _x - _s), (_s, 0, _x))
    wrapped = sympy.integrate(g.subs(_x, _s) * f.subs(_x, _x - _s + 1), (_s, _x, 1))
    return sympy.expand(inside + wrapped)


@lru_cache(maxsize=None)
def _wheel_by_convolution(k):
    g = _SAWTOOTH
    for _ in range(k - 2):
        g = _circle_convolve(g, _SAWTOOTH)
    closing = sympy.integrate(g.subs(_x, _s) * _SAWTOOTH.subs(_x, 1 - _s), (_s, 0, 1))
    return _to_fraction(closing)


def _wheel_by_patterns(k):
    total = Fraction(0)
    for order in permutations(range(1, k)):
        position = {0: 0}
        for place, point in enumerate(order, start=1):
            position[point] = place
        edges = tuple((position[j], position[(j + 1) % k]) for j in range(k))
        total += pattern_integral(PropagatorPattern(k - 1, edges))
    return total


def wheel_coefficient(k, method="convolution"):
    """
    Integral of P_12 P_23 ... P_k1 over k points on the circle.

    Args:
        k (int): Number of points, k >= 2
        method (str): "convolution" integrates the wheel as a k-fold circle
            convolution of the sawtooth; "patterns" sums pattern integrals
            over the (k-1)! cyclic orders

    Returns:
        Fraction: -B_k / k! for even k, 0 for odd k
    """
    if k < 2:
        raise ValueError(f"wheel needs at least 2 points, got {k}")
    if method == "convolution":
        value = _wheel_by_convolution(k)
    elif method == "patterns":
        value = _wheel_by_patterns(k)
    else:
        raise ValueError(f"unknown wheel method {method!r}")
    logger.debug(f"wheel({k}) by {method} = {value}")
    return value


def bernoulli_wheel(k):
    """Closed form -B_k / k!."""
    return -_to_fraction(sympy.bernoulli(k)) / factorial(k)
