import logging
from fractions import Fraction
from itertools import product
from math import factorial

from weyl import (
    DimensionMismatchError,
    WeylElement,
    accumulate,
    format_terms,
    monomial_factors,
    symplectic_pairs,
)

logger = logging.getLogger(__name__)


def merge_masks(left, right):
    """
    Concatenate two dy-masks and sort them.

    Returns:
        tuple: (sign, merged mask), or None when an index repeats
    """
    if set(left) & set(right):
        return None
    inversions = sum(1 for a in left for b in right if a > b)
    return (-1) ** inversions, tuple(sorted(left + right))


def iota_mask(index, mask):
    """Contract dy^index out of a sorted mask, as an odd left derivation."""
    if index not in mask:
        return None
    position = mask.index(index)
    return (-1) ** position, mask[:position] + mask[position + 1:]


def insert_dy(index, mask):
    """Wedge dy^index onto a sorted mask from the left."""
    if index in mask:
        return None
    before = sum(1 for k in mask if k < index)
    return (-1) ** before, tuple(sorted(mask + (index,)))


def lower(exps, index):
    return exps[:index] + (exps[index] - 1,) + exps[index + 1:]


class ScalarValue:
    """
    An element of K = C((hbar))[u, 1/u], kept as a map (hbar power, u power) -> Fraction.
    """
    __slots__ = ("terms",)

    def __init__(self, terms=None):
        clean = {}
        for key, coef in (terms or {}).items():
            accumulate(clean, key, Fraction(coef))
        self.terms = clean

    @classmethod
    def constant(cls, value, h=0, u=0):
        return cls({(h, u): value})

    @classmethod
    def one(cls):
        return cls.constant(1)

    def __add__(self, other):
        if isinstance(other, (int, Fraction)):
            other = ScalarValue.constant(other)
        if not isinstance(other, ScalarValue):
            return NotImplemented
        terms = dict(self.terms)
        for key, coef in other.terms.items():
            accumulate(terms, key, coef)
        return ScalarValue(terms)

    __radd__ = __add__

    def __neg__(self):
        return ScalarValue({key: -coef for key, coef in self.terms.items()})

    def __sub__(self, other):
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def scale(self, factor):
        factor = Fraction(factor)
        return ScalarValue({key: coef * factor for key, coef in self.terms.items()})

    def __mul__(self, other):
        if isinstance(other, (int, Fraction)):
            return self.scale(other)
        if not isinstance(other, ScalarValue):
            return NotImplemented
        terms = {}
        for (ha, ua), ca in self.terms.items():
            for (hb, ub), cb in other.terms.items():
                accumulate(terms, (ha + hb, ua + ub), ca * cb)
        return ScalarValue(terms)

    __rmul__ = __mul__

    def shift(self, h=0, u=0):
        return ScalarValue({(hh + h, uu + u): coef for (hh, uu), coef in self.terms.items()})

    def hbar_part(self, k):
        return ScalarValue({key: coef for key, coef in self.terms.items() if key[0] == k})

    def filter(self, predicate):
        return ScalarValue({key: coef for key, coef in self.terms.items() if predicate(*key)})

    def min_hbar(self):
        return min((h for h, _ in self.terms), default=None)

    def coefficient(self, h=0, u=0):
        return self.terms.get((h, u), Fraction(0))

    def ratio(self, other):
        """
        Return c with self = c * other, or None when they are not proportional.
        """
        if not other.terms:
            return None
        key = next(iter(other.terms))
        c = self.terms.get(key, Fraction(0)) / other.terms[key]
        return c if self == other.scale(c) else None

    def is_zero(self):
        return not self.terms

    def __bool__(self):
        return bool(self.terms)

    def __eq__(self, other):
        if isinstance(other, (int, Fraction)):
            other = ScalarValue.constant(other)
        if not isinstance(other, ScalarValue):
            return NotImplemented
        return self.terms == other.terms

    def __hash__(self):
        return hash(frozenset(self.terms.items()))

    def __str__(self):
        items = sorted(self.terms.items())
        return format_terms([(coef, monomial_factors((), h, u)) for (h, u), coef in items])

    def __repr__(self):
        return f"ScalarValue({self})"


class FormElement:
    """
    Sparse element of the formal de Rham algebra with hbar and u exponents.

    Terms are keyed by (y exponents, hbar power, dy-mask, u power). The
    dy-mask is a sorted tuple of 0-based indices; the stored coefficient
    belongs to the dy factors written in increasing order on the right.
    """
    __slots__ = ("dim", "terms")

    def __init__(self, dim, terms=None):
        self.dim = dim
        clean = {}
        for (exps, h, mask, u), coef in (terms or {}).items():
            exps, mask = tuple(exps), tuple(mask)
            if len(exps) != dim or any(k >= dim for k in mask):
                raise DimensionMismatchError(f"term {exps} {mask} does not live in dimension {dim}")
            if list(mask) != sorted(set(mask)):
                raise ValueError(f"dy-mask {mask} must be strictly increasing")
            accumulate(clean, (exps, h, mask, u), Fraction(coef))
        self.terms = clean

    @classmethod
    def zero(cls, dim):
        return cls(dim)

    @classmethod
    def from_weyl(cls, f):
        return cls(f.dim, {(exps, h, (), 0): coef for (exps, h), coef in f.terms.items()})

    @classmethod
    def constant(cls, dim, value, h=0, u=0):
        return cls(dim, {((0,) * dim, h, (), u): value})

    @classmethod
    def dy(cls, dim, *indices):
        """The form dy^{i1} dy^{i2} ... for 0-based indices, in the given order."""
        sign, mask = 1, ()
        for index in reversed(indices):
            inserted = insert_dy(index, mask)
            if inserted is None:
                return cls(dim)
            step, mask = inserted
            sign *= step
        return cls(dim, {((0,) * dim, 0, mask, 0): sign})

    def _check(self, other):
        if self.dim != other.dim:
            raise DimensionMismatchError(f"dimension {self.dim} does not match {other.dim}")

    def __add__(self, other):
        if isinstance(other, WeylElement):
            other = FormElement.from_weyl(other)
        if not isinstance(other, FormElement):
            return NotImplemented
        self._check(other)
        terms = dict(self.terms)
        for key, coef in other.terms.items():
            accumulate(terms, key, coef)
        return FormElement(self.dim, terms)

    def __radd__(self, other):
        if other == 0:
            return self
        return self.__add__(other)

    def __neg__(self):
        return FormElement(self.dim, {key: -coef for key, coef in self.terms.items()})

    def __sub__(self, other):
        return self + (-other)

    def scale(self, factor):
        factor = Fraction(factor)
        return FormElement(self.dim, {key: coef * factor for key, coef in self.terms.items()})

    def __mul__(self, other):
        if isinstance(other, (int, Fraction)):
            return self.scale(other)
        return NotImplemented

    __rmul__ = __mul__

    def shift(self, h=0, u=0):
        return FormElement(self.dim, {
            (exps, hh + h, mask, uu + u): coef for (exps, hh, mask, uu), coef in self.terms.items()
        })

    def wedge(self, other):
        """Graded-commutative product; y's are even and dy's anticommute."""
        self._check(other)
        terms = {}
        for (a, ha, ma, ua), ca in self.terms.items():
            for (b, hb, mb, ub), cb in other.terms.items():
                merged = merge_masks(ma, mb)
                if merged is None:
                    continue
                sign, mask = merged
                exps = tuple(x + y for x, y in zip(a, b))
                accumulate(terms, (exps, ha + hb, mask, ua + ub), sign * ca * cb)
        return FormElement(self.dim, terms)

    def filter(self, predicate):
        return FormElement(self.dim, {key: coef for key, coef in self.terms.items() if predicate(*key)})

    def hbar_part(self, k):
        return self.filter(lambda exps, h, mask, u: h == k)

    def is_zero(self):
        return not self.terms

    def __bool__(self):
        return bool(self.terms)

    def __eq__(self, other):
        if isinstance(other, WeylElement):
            other = FormElement.from_weyl(other)
        if not isinstance(other, FormElement):
            return NotImplemented
        return self.dim == other.dim and self.terms == other.terms

    def __hash__(self):
        return hash((self.dim, frozenset(self.terms.items())))

    def sorted_terms(self):
        return sorted(self.terms.items(), key=lambda item: (item[0][1], item[0][3], item[0][0], item[0][2]))

    def __str__(self):
        return format_terms([
            (coef, monomial_factors(exps, h, u, mask)) for (exps, h, mask, u), coef in self.sorted_terms()
        ])

    def __repr__(self):
        return f"FormElement({self})"


def as_form(element):
    if isinstance(element, WeylElement):
        return FormElement.from_weyl(element)
    return element


def d(omega):
    """De Rham differential sum_k dy^k d/dy^k, dy inserted from the left."""
    omega = as_form(omega)
    terms = {}
    for (exps, h, mask, u), coef in omega.terms.items():
        for k, e in enumerate(exps):
            if not e:
                continue
            inserted = insert_dy(k, mask)
            if inserted is None:
                continue
            sign, new_mask = inserted
            accumulate(terms, (lower(exps, k), h, new_mask, u), sign * e * coef)
    return FormElement(omega.dim, terms)


def iota(index, omega):
    """Contraction with d/dy^index."""
    omega = as_form(omega)
    terms = {}
    for (exps, h, mask, u), coef in omega.terms.items():
        contracted = iota_mask(index, mask)
        if contracted is not None:
            sign, new_mask = contracted
            accumulate(terms, (exps, h, new_mask, u), sign * coef)
    return FormElement(omega.dim, terms)


def lie(index, omega):
    """Lie derivative along d/dy^index; on constant-coefficient dy's it only differentiates coefficients."""
    omega = as_form(omega)
    terms = {}
    for (exps, h, mask, u), coef in omega.terms.items():
        if exps[index]:
            accumulate(terms, (lower(exps, index), h, mask, u), exps[index] * coef)
    return FormElement(omega.dim, terms)


def iota_pi(omega):
    """(1/2) omega^{ij} iota_i iota_j = sum over i < j of omega^{ij} iota_i iota_j."""
    omega = as_form(omega)
    result = FormElement.zero(omega.dim)
    for i, j, w in symplectic_pairs(omega.dim // 2):
        if i < j:
            result = result + iota(i, iota(j, omega)).scale(w)
    return result


def delta(omega):
    """BV operator omega^{ij} L_i iota_j."""
    omega = as_form(omega)
    result = FormElement.zero(omega.dim)
    for i, j, w in symplectic_pairs(omega.dim // 2):
        result = result + lie(i, iota(j, omega)).scale(w)
    return result


def bv_integrate(omega):
    """
    Berezin integration a -> sigma(u^n exp(hbar iota_Pi / u) a).

    Only terms with no y's and an even number of dy's survive; a term with
    2k dy's contributes iota_Pi^k / k! times hbar^k u^{n-k}.

    Args:
        omega (FormElement): Form to integrate

    Returns:
        ScalarValue: The integral
    """
    omega = as_form(omega)
    n = omega.dim // 2
    terms = {}
    for (exps, h, mask, u), coef in omega.terms.items():
        if any(exps) or len(mask) % 2:
            continue
        k = len(mask) // 2
        single = FormElement(omega.dim, {(exps, 0, mask, 0): 1})
        for _ in range(k):
            single = iota_pi(single)
        value = single.terms.get((exps, 0, (), 0), 0)
        accumulate(terms, (h + k, u + n - k), coef * value / factorial(k))
    return ScalarValue(terms)


class FormTensor:
    """
    Formal sum of ordered tensors of forms, omega_1 (x) ... (x) omega_k.

    Terms are keyed by (hbar power, u power, slots) with every slot an
    (exponents, dy-mask) pair; Koszul signs count dy's in the slots to the left.
    """
    __slots__ = ("dim", "terms")

    def __init__(self, dim, terms=None):
        self.dim = dim
        clean = {}
        for key, coef in (terms or {}).items():
            accumulate(clean, key, Fraction(coef))
        self.terms = clean

    @classmethod
    def from_factors(cls, factors, coefficient=1):
        factors = [as_form(f) for f in factors]
        dim = factors[0].dim
        terms = {}
        for choice in product(*(f.terms.items() for f in factors)):
            h = sum(key[1] for key, _ in choice)
            u = sum(key[3] for key, _ in choice)
            coef = Fraction(coefficient)
            for _, c in choice:
                coef *= c
            slots = tuple((key[0], key[2]) for key, _ in choice)
            accumulate(terms, (h, u, slots), coef)
        return cls(dim, terms)

    def _check(self, other):
        if self.dim != other.dim:
            raise DimensionMismatchError(f"dimension {self.dim} does not match {other.dim}")

    def __add__(self, other):
        if not isinstance(other, FormTensor):
            return NotImplemented
        self._check(other)
        terms = dict(self.terms)
        for key, coef in other.terms.items():
            accumulate(terms, key, coef)
        return FormTensor(self.dim, terms)

    def __neg__(self):
        return FormTensor(self.dim, {key: -coef for key, coef in self.terms.items()})

    def __sub__(self, other):
        if not isinstance(other, FormTensor):
            return NotImplemented
        return self + (-other)

    def __eq__(self, other):
        if not isinstance(other, FormTensor):
            return NotImplemented
        return self.dim == other.dim and self.terms == other.terms

    def __hash__(self):
        return hash((self.dim, frozenset(self.terms.items())))

    def is_zero(self):
        return not self.terms

    def multiply_out(self):
        """Wedge all slots together in order."""
        terms = {}
        for (h, u, slots), coef in self.terms.items():
            exps = tuple(map(sum, zip(*(s[0] for s in slots)))) if slots else (0,) * self.dim
            mask, sign = (), 1
            for _, slot_mask in slots:
                merged = merge_masks(mask, slot_mask)
                if merged is None:
                    break
                step, mask = merged
                sign *= step
            else:
                accumulate(terms, (exps, h, mask, u), sign * coef)
        return FormElement(self.dim, terms)


def _koszul(slots, position):
    return (-1) ** sum(len(mask) for _, mask in slots[:position])


def _slot_iota(slots, position, index):
    exps, mask = slots[position]
    contracted = iota_mask(index, mask)
    if contracted is None:
        return None
    sign, new_mask = contracted
    new_slots = slots[:position] + ((exps, new_mask),) + slots[position + 1:]
    return sign * _koszul(slots, position), new_slots


def _slot_lie(slots, position, index):
    exps, mask = slots[position]
    if not exps[index]:
        return None
    new_slots = slots[:position] + ((lower(exps, index), mask),) + slots[position + 1:]
    return exps[index], new_slots


def _tensor_d(slots):
    for position, (exps, mask) in enumerate(slots):
        sign = _koszul(slots, position)
        for k, e in enumerate(exps):
            inserted = insert_dy(k, mask) if e else None
            if inserted is None:
                continue
            step, new_mask = inserted
            yield sign * step * e, slots[:position] + ((lower(exps, k), new_mask),) + slots[position + 1:]


def _tensor_iota_pi(slots, pairs):
    width = len(slots)
    for alpha in range(width):
        for beta in range(width):
            for i, j, w in pairs:
                first = _slot_iota(slots, beta, j)
                if first is None:
                    continue
                second = _slot_iota(first[1], alpha, i)
                if second is None:
                    continue
                yield Fraction(w, 2) * first[0] * second[0], second[1]


def _tensor_delta(slots, pairs):
    width = len(slots)
    for alpha in range(width):
        for beta in range(width):
            for i, j, w in pairs:
                first = _slot_iota(slots, beta, j)
                if first is None:
                    continue
                second = _slot_lie(first[1], alpha, i)
                if second is None:
                    continue
                yield w * first[0] * second[0], second[1]


def tensor_apply(kind, t):
    """
    Extend d, iota_Pi or Delta to tensors of forms with Koszul signs.

    d acts slot by slot; iota_Pi and Delta also contract across slots, so
    that multiplying out commutes with each operator.

    Args:
        kind (str): One of "d", "iota_pi", "delta"
        t (FormTensor): Tensor to act on

    Returns:
        FormTensor: The result
    """
    pairs = symplectic_pairs(t.dim // 2)
    if kind == "d":
        expand = _tensor_d
    elif kind == "iota_pi":
        expand = lambda slots: _tensor_iota_pi(slots, pairs)
    elif kind == "delta":
        expand = lambda slots: _tensor_delta(slots, pairs)
    else:
        raise ValueError(f"unknown tensor operator {kind!r}")
    terms = {}
    for (h, u, slots), coef in t.terms.items():
        for factor, new_slots in expand(slots):
            accumulate(terms, (h, u, new_slots), factor * coef)
    return FormTensor(t.dim, terms)


def nabla(omega):
    """hbar d/dhbar plus the Euler field: scale each term by h + (y-degree + dy-degree)/2."""
    omega = as_form(omega)
    return FormElement(omega.dim, {
        (exps, h, mask, u): coef * (h + Fraction(sum(exps) + len(mask), 2))
        for (exps, h, mask, u), coef in omega.terms.items()
    })
