import logging
from fractions import Fraction
from functools import lru_cache
from math import factorial, perm

logger = logging.getLogger(__name__)


class DimensionMismatchError(ValueError):
    """Raised when two operands disagree on 2n or on the matrix rank."""


@lru_cache(maxsize=None)
def symplectic_pairs(n):
    """
    List the nonzero entries of the constant Darboux tensor on 2n coordinates.

    Coordinates 0..n-1 are the p's and n..2n-1 the q's, with omega^{i, n+i} = +1.

    Args:
        n (int): Half-dimension

    Returns:
        tuple: (i, j, omega_ij) for every ordered pair with omega_ij != 0
    """
    pairs = []
    for i in range(n):
        pairs.append((i, n + i, 1))
        pairs.append((n + i, i, -1))
    return tuple(sorted(pairs))


class SymplecticForm:
    """
    The constant tensor omega^{ij} in Darboux coordinates.
    """
    def __init__(self, n):
        if n < 1:
            raise ValueError(f"half-dimension must be positive, got {n}")
        self.n = n
        self.dim = 2 * n

    def __call__(self, i, j):
        if i < self.n and j == i + self.n:
            return 1
        if j < self.n and i == j + self.n:
            return -1
        return 0

    def pairs(self):
        return symplectic_pairs(self.n)


def _format_rational(value):
    value = Fraction(value)
    if value.denominator == 1:
        return str(value.numerator)
    return f"{value.numerator}/{value.denominator}"


def format_terms(items):
    """
    Render (coefficient, factor strings) pairs in the shared literal grammar.

    Args:
        items (list): (Fraction, list of str) in canonical order

    Returns:
        str: e.g. "3/2 h^-1 y1^2 dy2 - y2", or "0" when empty
    """
    pieces = []
    for index, (coef, factors) in enumerate(items):
        magnitude = abs(coef) if index else coef
        if factors and magnitude == 1:
            body = " ".join(factors)
        elif factors:
            body = _format_rational(magnitude) + " " + " ".join(factors)
        else:
            body = _format_rational(magnitude)
        if index == 0:
            pieces.append(body)
        else:
            pieces.append(("- " if coef < 0 else "+ ") + body)
    return " ".join(pieces) if pieces else "0"


def monomial_factors(exps, h=0, u=0, mask=()):
    factors = []
    if h:
        factors.append(f"h^{h}")
    if u:
        factors.append(f"u^{u}")
    for index, e in enumerate(exps):
        if e == 1:
            factors.append(f"y{index + 1}")
        elif e > 1:
            factors.append(f"y{index + 1}^{e}")
    factors.extend(f"dy{k + 1}" for k in mask)
    return factors


def accumulate(terms, key, coef):
    """Add coef into a sparse term map, dropping entries that cancel."""
    if not coef:
        return
    total = terms.get(key, 0) + coef
    if total:
        terms[key] = total
    else:
        terms.pop(key, None)


class WeylElement:
    """
    Sparse element of the Weyl algebra W_2n with Laurent hbar.

    Terms are keyed by (y exponent tuple, hbar exponent). Instances are
    immutable once built.
    """
    __slots__ = ("dim", "terms")

    def __init__(self, dim, terms=None):
        self.dim = dim
        clean = {}
        for (exps, h), coef in (terms or {}).items():
            if len(exps) != dim:
                raise DimensionMismatchError(f"monomial {exps} does not live in dimension {dim}")
            accumulate(clean, (tuple(exps), h), Fraction(coef))
        self.terms = clean

    @classmethod
    def zero(cls, dim):
        return cls(dim)

    @classmethod
    def constant(cls, dim, value, h=0):
        return cls(dim, {((0,) * dim, h): value})

    @classmethod
    def one(cls, dim):
        return cls.constant(dim, 1)

    @classmethod
    def variable(cls, dim, index, power=1):
        exps = [0] * dim
        exps[index] = power
        return cls(dim, {(tuple(exps), 0): 1})

    @classmethod
    def hbar(cls, dim, power=1):
        return cls.constant(dim, 1, h=power)

    def _check(self, other):
        if self.dim != other.dim:
            raise DimensionMismatchError(f"dimension {self.dim} does not match {other.dim}")

    def __add__(self, other):
        if isinstance(other, (int, Fraction)):
            other = WeylElement.constant(self.dim, other)
        if not isinstance(other, WeylElement):
            return NotImplemented
        self._check(other)
        terms = dict(self.terms)
        for key, coef in other.terms.items():
            accumulate(terms, key, coef)
        return WeylElement(self.dim, terms)

    def __radd__(self, other):
        if other == 0:
            return self
        return self.__add__(other)

    def __neg__(self):
        return WeylElement(self.dim, {key: -coef for key, coef in self.terms.items()})

    def __sub__(self, other):
        return self + (-other)

    def scale(self, factor):
        factor = Fraction(factor)
        if not factor:
            return WeylElement(self.dim)
        return WeylElement(self.dim, {key: coef * factor for key, coef in self.terms.items()})

    def __mul__(self, other):
        if isinstance(other, (int, Fraction)):
            return self.scale(other)
        return NotImplemented

    __rmul__ = __mul__

    def shift_hbar(self, k):
        return WeylElement(self.dim, {(exps, h + k): coef for (exps, h), coef in self.terms.items()})

    def derivative(self, index):
        """Partial derivative in y^index."""
        terms = {}
        for (exps, h), coef in self.terms.items():
            if exps[index]:
                lowered = exps[:index] + (exps[index] - 1,) + exps[index + 1:]
                accumulate(terms, (lowered, h), coef * exps[index])
        return WeylElement(self.dim, terms)

    def commutative_mul(self, other):
        """Pointwise (undeformed) product."""
        self._check(other)
        terms = {}
        for (a, ha), ca in self.terms.items():
            for (b, hb), cb in other.terms.items():
                accumulate(terms, (tuple(x + y for x, y in zip(a, b)), ha + hb), ca * cb)
        return WeylElement(self.dim, terms)

    def filter(self, predicate):
        return WeylElement(self.dim, {key: coef for key, coef in self.terms.items() if predicate(*key)})

    def hbar_part(self, k):
        return self.filter(lambda exps, h: h == k)

    def min_hbar(self):
        return min((h for _, h in self.terms), default=None)

    def is_zero(self):
        return not self.terms

    def __bool__(self):
        return bool(self.terms)

    def __eq__(self, other):
        if isinstance(other, (int, Fraction)):
            return self == WeylElement.constant(self.dim, other)
        if not isinstance(other, WeylElement):
            return NotImplemented
        return self.dim == other.dim and self.terms == other.terms

    def __hash__(self):
        return hash((self.dim, frozenset(self.terms.items())))

    def sorted_terms(self):
        return sorted(self.terms.items(), key=lambda item: (item[0][1], item[0][0]))

    def __str__(self):
        return format_terms([(coef, monomial_factors(exps, h)) for (exps, h), coef in self.sorted_terms()])

    def __repr__(self):
        return f"WeylElement({self})"


def weight(exps, h):
    return sum(exps) + 2 * h


class MatrixElement:
    """
    An r x r array of WeylElements, the algebra gl_r(W_2n).
    """
    __slots__ = ("dim", "rank", "entries")

    def __init__(self, dim, rank, entries=None):
        self.dim = dim
        self.rank = rank
        if entries is None:
            entries = [[WeylElement(dim) for _ in range(rank)] for _ in range(rank)]
        rows = tuple(tuple(row) for row in entries)
        if len(rows) != rank or any(len(row) != rank for row in rows):
            raise DimensionMismatchError(f"matrix entries are not {rank} x {rank}")
        for row in rows:
            for entry in row:
                if entry.dim != dim:
                    raise DimensionMismatchError(f"entry dimension {entry.dim} does not match {dim}")
        self.entries = rows

    @classmethod
    def zero(cls, dim, rank):
        return cls(dim, rank)

    @classmethod
    def scalar(cls, f, rank):
        zero = WeylElement(f.dim)
        return cls(f.dim, rank, [[f if a == b else zero for b in range(rank)] for a in range(rank)])

    @classmethod
    def identity(cls, dim, rank):
        return cls.scalar(WeylElement.one(dim), rank)

    @classmethod
    def unit(cls, dim, rank, a, b, f=None):
        """The matrix unit E_ab, optionally multiplied by the scalar f."""
        f = WeylElement.one(dim) if f is None else f
        zero = WeylElement(dim)
        return cls(dim, rank, [[f if (i, j) == (a, b) else zero for j in range(rank)] for i in range(rank)])

    @classmethod
    def from_rows(cls, rows):
        rank = len(rows)
        if not rank:
            raise DimensionMismatchError("a matrix needs at least one row")
        return cls(rows[0][0].dim, rank, rows)

    def _check(self, other):
        if self.dim != other.dim or self.rank != other.rank:
            raise DimensionMismatchError(
                f"(2n, r) = ({self.dim}, {self.rank}) does not match ({other.dim}, {other.rank})")

    def map_entries(self, fn):
        return MatrixElement(self.dim, self.rank, [[fn(entry) for entry in row] for row in self.entries])

    def __add__(self, other):
        if not isinstance(other, MatrixElement):
            return NotImplemented
        self._check(other)
        return MatrixElement(self.dim, self.rank, [
            [x + y for x, y in zip(row, other_row)] for row, other_row in zip(self.entries, other.entries)
        ])

    def __radd__(self, other):
        if other == 0:
            return self
        return NotImplemented

    def __neg__(self):
        return self.map_entries(lambda entry: -entry)

    def __sub__(self, other):
        return self + (-other)

    def scale(self, factor):
        return self.map_entries(lambda entry: entry.scale(factor))

    def __mul__(self, other):
        if isinstance(other, (int, Fraction)):
            return self.scale(other)
        return NotImplemented

    __rmul__ = __mul__

    def shift_hbar(self, k):
        return self.map_entries(lambda entry: entry.shift_hbar(k))

    def trace(self):
        return sum((self.entries[a][a] for a in range(self.rank)), WeylElement(self.dim))

    def is_scalar(self):
        diagonal = self.entries[0][0]
        for a in range(self.rank):
            for b in range(self.rank):
                expected = diagonal if a == b else WeylElement(self.dim)
                if self.entries[a][b] != expected:
                    return False
        return True

    def min_hbar(self):
        values = [entry.min_hbar() for row in self.entries for entry in row if entry]
        return min(values, default=None)

    def is_zero(self):
        return all(entry.is_zero() for row in self.entries for entry in row)

    def __bool__(self):
        return not self.is_zero()

    def __eq__(self, other):
        if not isinstance(other, MatrixElement):
            return NotImplemented
        return (self.dim, self.rank, self.entries) == (other.dim, other.rank, other.entries)

    def __hash__(self):
        return hash((self.dim, self.rank, self.entries))

    def __str__(self):
        rows = ", ".join("[" + ", ".join(str(entry) for entry in row) + "]" for row in self.entries)
        return f"mat {self.rank} [{rows}]"

    def __repr__(self):
        return f"MatrixElement({self})"


@lru_cache(maxsize=None)
def star_monomials(left, right, n):
    """
    Expand e^{hbar Pi} on a pair of monomials.

    Every ordered pair (i, j) with omega^{ij} != 0 contributes an independent
    factor sum_k (hbar omega^{ij} / 2)^k / k! d_i^k (x) d_j^k.

    Returns:
        tuple: (product exponents, hbar power, coefficient)
    """
    pairs = symplectic_pairs(n)
    results = []

    def expand(index, left_left, right_left, order, coef):
        if index == len(pairs):
            exps = tuple(x + y for x, y in zip(left_left, right_left))
            results.append((exps, order, coef))
            return
        i, j, w = pairs[index]
        top = min(left_left[i], right_left[j])
        for k in range(top + 1):
            factor = Fraction(w, 2) ** k / factorial(k) * perm(left_left[i], k) * perm(right_left[j], k)
            new_left = left_left[:i] + (left_left[i] - k,) + left_left[i + 1:]
            new_right = right_left[:j] + (right_left[j] - k,) + right_left[j + 1:]
            expand(index + 1, new_left, new_right, order + k, coef * factor)

    expand(0, left, right, 0, Fraction(1))
    return tuple(results)


def _moyal_weyl(f, g):
    f._check(g)
    n = f.dim // 2
    terms = {}
    for (a, ha), ca in f.terms.items():
        for (b, hb), cb in g.terms.items():
            for exps, order, coef in star_monomials(a, b, n):
                accumulate(terms, (exps, ha + hb + order), ca * cb * coef)
    return WeylElement(f.dim, terms)


def moyal_mul(f, g):
    """
    Moyal product m(e^{hbar Pi}(f (x) g)), with matrix multiplication for matrices.

    Args:
        f (WeylElement or MatrixElement): Left factor
        g (WeylElement or MatrixElement): Right factor

    Returns:
        Same kind as the inputs
    """
    if isinstance(f, WeylElement) and isinstance(g, WeylElement):
        return _moyal_weyl(f, g)
    if not (isinstance(f, MatrixElement) and isinstance(g, MatrixElement)):
        raise DimensionMismatchError("moyal_mul needs two WeylElements or two MatrixElements")
    f._check(g)
    rows = []
    for a in range(f.rank):
        row = []
        for c in range(f.rank):
            entry = WeylElement(f.dim)
            for b in range(f.rank):
                if f.entries[a][b] and g.entries[b][c]:
                    entry = entry + _moyal_weyl(f.entries[a][b], g.entries[b][c])
            row.append(entry)
        rows.append(row)
    return MatrixElement(f.dim, f.rank, rows)


def bracket(f, g):
    """The Lie bracket [f, g] = (f*g - g*f) / hbar."""
    return (moyal_mul(f, g) - moyal_mul(g, f)).shift_hbar(-1)


def _symbol_weyl(f):
    return f.filter(lambda exps, h: not any(exps))


def symbol(f):
    """Keep only the y-degree-0 terms (set every p and q to zero)."""
    if isinstance(f, MatrixElement):
        return f.map_entries(_symbol_weyl)
    return _symbol_weyl(f)


def weight_components(f):
    """
    Split f by weight, wt(y) = 1 and wt(hbar) = 2.

    Returns:
        list: (weight, WeylElement) in increasing weight
    """
    grouped = {}
    for (exps, h), coef in f.terms.items():
        grouped.setdefault(weight(exps, h), {})[(exps, h)] = coef
    return [(w, WeylElement(f.dim, grouped[w])) for w in sorted(grouped)]


def truncate_to_weight(f, max_weight):
    """Drop every term of weight above max_weight."""
    if isinstance(f, MatrixElement):
        return f.map_entries(lambda entry: truncate_to_weight(entry, max_weight))
    return f.filter(lambda exps, h: weight(exps, h) <= max_weight)
