import logging
from fractions import Fraction
from functools import lru_cache
from itertools import combinations, product

from weyl import (
    DimensionMismatchError,
    MatrixElement,
    WeylElement,
    accumulate,
    bracket,
    format_terms,
    monomial_factors,
    star_monomials,
)

logger = logging.getLogger(__name__)


def matrix_basis(M):
    """
    Expand a matrix into matrix units times monomials.

    Args:
        M (MatrixElement or WeylElement): A WeylElement counts as a multiple of the identity

    Yields:
        tuple: ((a, b, exps), hbar power, coefficient)
    """
    if isinstance(M, WeylElement):
        raise DimensionMismatchError("expand WeylElements through MatrixElement.scalar first")
    for a, row in enumerate(M.entries):
        for b, entry in enumerate(row):
            for (exps, h), coef in entry.terms.items():
                yield (a, b, exps), h, coef


def slot_matrix(dim, rank, slot, coef=1, h=0):
    a, b, exps = slot
    return MatrixElement.unit(dim, rank, a, b, WeylElement(dim, {(exps, h): coef}))


@lru_cache(maxsize=None)
def slot_product(left, right, n):
    """Moyal product of two basis slots E_ab y^x and E_cd y^z."""
    a, b, x = left
    c, e, z = right
    if b != c:
        return ()
    return tuple(((a, e, exps), order, coef) for exps, order, coef in star_monomials(x, z, n))


def _reduce_slot(slot, rank):
    a, b, exps = slot
    if a != b or any(exps) or a != rank - 1:
        return ((slot, 1),)
    return tuple(((c, c, exps), -1) for c in range(rank - 1))


def shuffle_positions(p, q):
    """Positions taken by a q-block when it is shuffled into a p-block."""
    return combinations(range(p + q), q)


class TensorChain:
    """
    Formal sum of cyclic tensors A_0 (x) A_1 (x) ... (x) A_p over gl_r(W_2n).

    Terms are keyed by (hbar power, u power, slots), each slot a matrix unit
    with a monomial, (a, b, exps). Slots from position 1 on are reduced
    modulo scalar multiples of the identity.
    """
    normalized_from = 1
    __slots__ = ("dim", "rank", "terms")

    def __init__(self, dim, rank, terms=None):
        self.dim = dim
        self.rank = rank
        clean = {}
        for (h, u, slots), coef in (terms or {}).items():
            for reduced, factor in self._normalize(slots):
                accumulate(clean, (h, u, reduced), Fraction(coef) * factor)
        self.terms = clean

    def _normalize(self, slots):
        head = tuple(slots[:self.normalized_from])
        choices = [_reduce_slot(slot, self.rank) for slot in slots[self.normalized_from:]]
        for picked in product(*choices):
            factor = 1
            for _, sign in picked:
                factor *= sign
            yield head + tuple(slot for slot, _ in picked), factor

    @classmethod
    def zero(cls, dim, rank):
        return cls(dim, rank)

    @classmethod
    def unit(cls, dim, rank):
        """The 0-chain Id, or the empty block for TensorBlock."""
        if cls.normalized_from == 0:
            return cls(dim, rank, {(0, 0, ()): 1})
        return cls.from_entries([MatrixElement.identity(dim, rank)])

    @classmethod
    def from_entries(cls, entries, coefficient=1, h=0, u=0):
        """
        Build the tensor of the given entries, expanded multilinearly.

        Args:
            entries (list): MatrixElements, or WeylElements meaning multiples of Id
            coefficient: Rational prefactor
            h (int): Extra hbar power
            u (int): u power

        Returns:
            TensorChain: The normalized chain
        """
        if not entries:
            raise DimensionMismatchError("a chain needs at least one entry")
        rank = next((e.rank for e in entries if isinstance(e, MatrixElement)), 1)
        matrices = [MatrixElement.scalar(e, rank) if isinstance(e, WeylElement) else e for e in entries]
        dim = matrices[0].dim
        for M in matrices:
            if (M.dim, M.rank) != (dim, rank):
                raise DimensionMismatchError(f"chain entries disagree on (2n, r) = ({dim}, {rank})")
        terms = {}
        for choice in product(*(list(matrix_basis(M)) for M in matrices)):
            coef = Fraction(coefficient)
            for _, _, c in choice:
                coef *= c
            key = (h + sum(hh for _, hh, _ in choice), u, tuple(slot for slot, _, _ in choice))
            accumulate(terms, key, coef)
        return cls(dim, rank, terms)

    def _like(self, terms):
        return type(self)(self.dim, self.rank, terms)

    def _check(self, other):
        if (self.dim, self.rank) != (other.dim, other.rank):
            raise DimensionMismatchError(
                f"(2n, r) = ({self.dim}, {self.rank}) does not match ({other.dim}, {other.rank})")

    def __add__(self, other):
        if not isinstance(other, TensorChain):
            return NotImplemented
        self._check(other)
        terms = dict(self.terms)
        for key, coef in other.terms.items():
            accumulate(terms, key, coef)
        return self._like(terms)

    def __radd__(self, other):
        if other == 0:
            return self
        return NotImplemented

    def __neg__(self):
        return self._like({key: -coef for key, coef in self.terms.items()})

    def __sub__(self, other):
        return self + (-other)

    def scale(self, factor):
        factor = Fraction(factor)
        return self._like({key: coef * factor for key, coef in self.terms.items()})

    def __mul__(self, other):
        if isinstance(other, (int, Fraction)):
            return self.scale(other)
        return NotImplemented

    __rmul__ = __mul__

    def shift(self, h=0, u=0):
        return self._like({(hh + h, uu + u, slots): coef for (hh, uu, slots), coef in self.terms.items()})

    def lengths(self):
        return sorted({len(slots) for _, _, slots in self.terms})

    def is_zero(self):
        return not self.terms

    def __bool__(self):
        return bool(self.terms)

    def __eq__(self, other):
        if not isinstance(other, TensorChain):
            return NotImplemented
        return (self.dim, self.rank, self.terms) == (other.dim, other.rank, other.terms)

    def __hash__(self):
        return hash((self.dim, self.rank, frozenset(self.terms.items())))

    def slot_text(self, slot):
        if self.rank == 1:
            return str(WeylElement(self.dim, {(slot[2], 0): 1}))
        return str(slot_matrix(self.dim, self.rank, slot))

    def __str__(self):
        items = []
        for (h, u, slots), coef in sorted(self.terms.items()):
            body = "chain [ " + " ; ".join(self.slot_text(slot) for slot in slots) + " ]"
            items.append((coef, monomial_factors((), h, u) + [body]))
        return format_terms(items)

    def __repr__(self):
        return f"{type(self).__name__}({self})"


class TensorBlock(TensorChain):
    """A tensor block with no distinguished slot 0; every slot is reduced."""
    normalized_from = 0
    __slots__ = ()

    def __str__(self):
        items = []
        for (h, u, slots), coef in sorted(self.terms.items()):
            body = "block [ " + " ; ".join(self.slot_text(slot) for slot in slots) + " ]"
            items.append((coef, monomial_factors((), h, u) + [body]))
        return format_terms(items)


def _multiply_into(terms, coef, h, u, before, pair, after, n):
    for slot, order, c in slot_product(pair[0], pair[1], n):
        accumulate(terms, (h + order, u, before + (slot,) + after), coef * c)


def hochschild_b(c):
    """
    Hochschild boundary.

    b(a_0 .. a_p) = (-1)^p a_p a_0 (x) a_1 .. a_{p-1} + sum_i (-1)^i a_0 .. a_i a_{i+1} .. a_p
    """
    n = c.dim // 2
    terms = {}
    for (h, u, slots), coef in c.terms.items():
        p = len(slots) - 1
        if p < 1:
            continue
        _multiply_into(terms, (-1) ** p * coef, h, u, (), (slots[p], slots[0]), slots[1:p], n)
        for i in range(p):
            _multiply_into(terms, (-1) ** i * coef, h, u, slots[:i], (slots[i], slots[i + 1]), slots[i + 2:], n)
    return c._like(terms)


def connes_B(c):
    """Connes operator: sum_i (-1)^{p i} 1 (x) a_i .. a_p (x) a_0 .. a_{i-1}."""
    zeros = (0,) * c.dim
    terms = {}
    for (h, u, slots), coef in c.terms.items():
        p = len(slots) - 1
        for i in range(p + 1):
            rotated = slots[i:] + slots[:i]
            for diagonal in range(c.rank):
                accumulate(terms, (h, u, ((diagonal, diagonal, zeros),) + rotated), (-1) ** (p * i) * coef)
    return c._like(terms)


def shuffle(s, t):
    """
    Shuffle product of two tensor blocks, keeping each block's internal order.

    Args:
        s (TensorBlock): Left block
        t (TensorBlock): Right block

    Returns:
        TensorBlock: Sum over all (p, q)-shuffles
    """
    s._check(t)
    terms = {}
    for (hs, us, left), cs in s.terms.items():
        for (ht, ut, right), ct in t.terms.items():
            p, q = len(left), len(right)
            for positions in shuffle_positions(p, q):
                chosen = set(positions)
                merged, li, ri = [], iter(left), iter(right)
                for index in range(p + q):
                    merged.append(next(ri) if index in chosen else next(li))
                accumulate(terms, (hs + ht, us + ut, tuple(merged)), cs * ct)
    return TensorBlock(s.dim, s.rank, terms)


def adjoint_action(a, c):
    """
    The g-action on chains, a . (O_0 .. O_p) = sum_s O_0 .. [a, O_s] .. O_p.

    Args:
        a (MatrixElement): Acting element
        c (TensorChain): Chain

    Returns:
        TensorChain: The result
    """
    if isinstance(a, WeylElement):
        a = MatrixElement.scalar(a, c.rank)
    terms = {}
    for (h, u, slots), coef in c.terms.items():
        for position, slot in enumerate(slots):
            commutator = bracket(a, slot_matrix(c.dim, c.rank, slot))
            for new_slot, hh, cc in matrix_basis(commutator):
                key = (h + hh, u, slots[:position] + (new_slot,) + slots[position + 1:])
                accumulate(terms, key, coef * cc)
    return c._like(terms)


def nabla(c):
    """hbar d/dhbar plus the Euler field, acting on every entry of a chain."""
    return c._like({
        (h, u, slots): coef * (h + Fraction(sum(sum(exps) for _, _, exps in slots), 2))
        for (h, u, slots), coef in c.terms.items()
    })
