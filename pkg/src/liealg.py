import logging
import operator
from collections import namedtuple
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from itertools import combinations
from math import factorial

import sympy

from forms import ScalarValue
from weyl import DimensionMismatchError, MatrixElement, WeylElement, bracket

logger = logging.getLogger(__name__)


class MembershipError(ValueError):
    """Raised when an element is not in g = W+ Id + hbar gl_r(W+)."""


class CochainArityError(ValueError):
    """Raised when a characteristic cochain is evaluated on an odd number of arguments."""


def _as_matrix(x, rank):
    if isinstance(x, LieElement):
        return x.matrix
    if isinstance(x, WeylElement):
        return MatrixElement.scalar(x, rank or 1)
    if isinstance(x, MatrixElement):
        if rank is not None and x.rank != rank:
            raise DimensionMismatchError(f"argument has rank {x.rank}, expected {rank}")
        return x
    raise MembershipError(f"cannot interpret {x!r} as an element of g")


class LieElement:
    """
    A matrix certified to lie in g, with its decomposition f Id + hbar A.

    f is the hbar-free part, which must be a multiple of the identity; A has
    no negative hbar powers.
    """
    __slots__ = ("matrix", "scalar", "hbar_part")

    def __init__(self, matrix, scalar, hbar_part):
        self.matrix = matrix
        self.scalar = scalar
        self.hbar_part = hbar_part

    @classmethod
    def certify(cls, x, rank=None):
        """
        Check membership in g and decompose.

        Args:
            x (MatrixElement, WeylElement or LieElement): Candidate element
            rank (int): Expected rank; WeylElements are promoted to this rank

        Returns:
            LieElement: The certified element

        Raises:
            MembershipError: If x has negative hbar powers or a non-scalar hbar-free part
        """
        if isinstance(x, LieElement):
            return x
        M = _as_matrix(x, rank)
        lowest = M.min_hbar()
        if lowest is not None and lowest < 0:
            raise MembershipError(f"{M} has a negative power of hbar")
        classical = M.map_entries(lambda entry: entry.hbar_part(0))
        if not classical.is_scalar():
            raise MembershipError(f"the hbar-free part of {M} is not a multiple of the identity")
        f = classical.entries[0][0]
        A = (M - MatrixElement.scalar(f, M.rank)).shift_hbar(-1)
        return cls(M, f, A)

    def __repr__(self):
        return f"LieElement({self.matrix})"


def certify_all(args, rank):
    return [LieElement.certify(a, rank).matrix for a in args]


def is_in_g(x, rank=None):
    try:
        LieElement.certify(x, rank)
    except MembershipError:
        return False
    return True


@dataclass(frozen=True)
class HDecomposition:
    """
    Components of pr(a) in h = sp_2n + hbar gl_r + C + sum_{i>1} hbar^i C.

    Attributes:
        sp (WeylElement): Homogeneous quadratic scalar
        gl (MatrixElement): hbar times a constant matrix
        constant (Fraction): The value f(0)
        central (WeylElement): Pure-hbar scalar with hbar^2 and higher
    """
    sp: WeylElement
    gl: MatrixElement
    constant: Fraction
    central: WeylElement

    @property
    def scalar_part(self):
        """constant + central, the C + hbar^i C component as one pure-hbar scalar."""
        return self.central + self.constant

    def embed(self):
        rank = self.gl.rank
        return MatrixElement.scalar(self.sp + self.scalar_part, rank) + self.gl


def embed(decomposition):
    return decomposition.embed()


def pr(a, rank=None):
    """
    The h-equivariant projection g -> h.

    Args:
        a: Element of g
        rank (int): Rank used when a is a WeylElement

    Returns:
        HDecomposition: (quadratic part of f, hbar A_1(0), f(0), trace part of the higher hbar^i A_i(0))
    """
    lie = LieElement.certify(a, rank)
    M, f = lie.matrix, lie.scalar
    dim, r = M.dim, M.rank
    zeros = (0,) * dim
    sp = f.filter(lambda exps, h: sum(exps) == 2)
    gl = M.map_entries(lambda entry: entry.filter(lambda exps, h: h == 1 and not any(exps)))
    constant = f.terms.get((zeros, 0), Fraction(0))
    central = M.trace().filter(lambda exps, h: h >= 2 and not any(exps)).scale(Fraction(1, r))
    return HDecomposition(sp, gl, constant, central)


def is_in_h(x, rank=None):
    if not is_in_g(x, rank):
        return False
    M = LieElement.certify(x, rank).matrix
    return pr(M).embed() == M


Curvature = namedtuple("Curvature", ["r1", "r2", "r3"])


def curvature(a, b, rank=None):
    """
    R(a, b) = pr[a, b] - [pr a, pr b], split into its sp, gl and scalar parts.

    Returns:
        Curvature: (R1 quadratic scalar, R2 hbar times constant matrix, R3 pure-hbar scalar)
    """
    A = LieElement.certify(a, rank).matrix
    B = LieElement.certify(b, rank).matrix
    top = pr(bracket(A, B))
    low = pr(bracket(pr(A).embed(), pr(B).embed()))
    return Curvature(top.sp - low.sp, top.gl - low.gl, top.scalar_part - low.scalar_part)


def gamma_hat(a, rank=None):
    """a minus the embedding of pr(a)."""
    M = LieElement.certify(a, rank).matrix
    return M - pr(M).embed()


def _signed(value, sign):
    return value if sign > 0 else -value


def ce_differential_eval(cochain, args, action="trivial", zero=0):
    """
    Evaluate the Chevalley-Eilenberg differential of a cochain at args.

    (d alpha)(a_1..a_{k+1}) = sum_i (-1)^{i-1} a_i . alpha(..no a_i..)
                            + sum_{i<j} (-1)^{i+j} alpha([a_i, a_j], ..no a_i, a_j..)

    Args:
        cochain (callable): Maps an argument list to a value
        args (list): Arguments a_1 .. a_{k+1}
        action: "trivial", "adjoint" (bracket on g-valued cochains), or a
            callable (a, rest) returning a . alpha(rest)
        zero: Starting value of the sum

    Returns:
        The value of the differential
    """
    args = list(args)
    total = zero
    if action != "trivial":
        for i, a in enumerate(args):
            rest = args[:i] + args[i + 1:]
            if action == "adjoint":
                term = bracket(a, cochain(rest))
            elif callable(action):
                term = action(a, rest)
            else:
                raise ValueError(f"unknown action {action!r}")
            total = total + _signed(term, (-1) ** i)
    for i, j in combinations(range(len(args)), 2):
        rest = args[:i] + args[i + 1:j] + args[j + 1:]
        total = total + _signed(cochain([bracket(args[i], args[j])] + rest), (-1) ** (i + j))
    return total


def maurer_cartan_residual(a, b, rank=None):
    """(d Theta)(a, b) + 1/2 [Theta, Theta](a, b) for the tautological cochain Theta(x) = x."""
    A = LieElement.certify(a, rank).matrix
    B = LieElement.certify(b, rank).matrix
    differential = ce_differential_eval(lambda xs: xs[0], [A, B], "trivial", MatrixElement.zero(A.dim, A.rank))
    return differential + (bracket(A, B) - bracket(B, A)).scale(Fraction(1, 2))


def sp_matrix(X):
    """
    Matrix of l -> [X, l] on the linear span of y, for quadratic X.

    Returns:
        sympy.Matrix: Column j holds the coefficients of [X, y^j]
    """
    dim = X.dim
    matrix = sympy.zeros(dim, dim)
    for j in range(dim):
        image = bracket(X, WeylElement.variable(dim, j))
        for (exps, h), coef in image.terms.items():
            if h != 0 or sum(exps) != 1:
                raise ValueError(f"{X} does not act linearly on span(y)")
            matrix[exps.index(1), j] = sympy.Rational(coef.numerator, coef.denominator)
    return matrix


def _fraction(value):
    value = sympy.nsimplify(value)
    return Fraction(int(value.p), int(value.q))


@lru_cache(maxsize=None)
def log_sinh_coefficients(k):
    """Coefficient of y^k in log(sinh(y) / y)."""
    y = sympy.symbols("y")
    series = sympy.series(sympy.log(sympy.sinh(y) / y), y, 0, k + 1).removeO()
    return _fraction(series.coeff(y, k))


def ahat_log_coefficients(k):
    """Coefficient of tr(R1^k) in log A-hat = -1/2 sum_k b_k 2^{-k} tr(R1^k)."""
    if k % 2:
        return Fraction(0)
    return -Fraction(1, 2) * log_sinh_coefficients(k) / 2 ** k


def subsets(size):
    for k in range(size + 1):
        yield from combinations(range(size), k)


def shuffle_sign(part, whole):
    rest = [x for x in whole if x not in part]
    return (-1) ** sum(1 for t in part for s in rest if s < t)


def cup(left, right, size, multiply=operator.mul):
    """
    Shuffle (cup) product of cochain tables.

    A table maps a sorted tuple of argument indices to the cochain value on
    those arguments; missing subsets are zero.

    Args:
        left (dict): First factor
        right (dict): Second factor
        size (int): Number of arguments
        multiply (callable): Product of values

    Returns:
        dict: (left cup right)(S) = sum_T sign(T, S - T) left(T) right(S - T)
    """
    result = {}
    for whole in subsets(size):
        total = None
        for k in range(len(whole) + 1):
            for part in combinations(whole, k):
                rest = tuple(x for x in whole if x not in part)
                if part not in left or rest not in right:
                    continue
                term = _signed(multiply(left[part], right[rest]), shuffle_sign(part, whole))
                total = term if total is None else total + term
        if total is not None:
            result[whole] = total
    return result


def cochain_exp(table, size, one):
    """exp of an even cochain table with zero degree-0 part, under cup."""
    result = {(): one}
    power = {(): one}
    k = 0
    while True:
        k += 1
        power = cup(power, table, size)
        power = {key: value for key, value in power.items() if value != 0}
        if not power:
            return result
        for key, value in power.items():
            scaled = value * Fraction(1, factorial(k))
            result[key] = result[key] + scaled if key in result else scaled


def rescale_u(table, factor=lambda degree: ScalarValue.constant(1, u=-(degree // 2))):
    """Multiply each degree-p component by factor(p), u^{-p/2} by default."""
    return {key: value * factor(len(key)) for key, value in table.items()}


def curvature_table(args, rank=None):
    matrices = [LieElement.certify(a, rank).matrix for a in args]
    return {(i, j): curvature(matrices[i], matrices[j]) for i, j in combinations(range(len(args)), 2)}


def matrix_trace_table(table):
    traces = {}
    for key, matrix in table.items():
        value = _fraction(matrix.trace())
        if value:
            traces[key] = value
    return traces


def matrix_powers(base, size, top):
    """Tables of base^{cup k} for k = 1..top."""
    powers = [base]
    while len(powers) < top:
        powers.append(cup(powers[-1], base, size))
    return powers


def log_ahat_table(args, rank=None, curvatures=None):
    """log A-hat as a cochain table with rational values."""
    size = len(args)
    curvatures = curvature_table(args, rank) if curvatures is None else curvatures
    base = {key: sp_matrix(value.r1) for key, value in curvatures.items() if value.r1}
    table = {}
    if not base:
        return table
    for k, power in enumerate(matrix_powers(base, size, size // 2), start=1):
        coefficient = ahat_log_coefficients(k)
        if not coefficient:
            continue
        for key, value in matrix_trace_table(power).items():
            table[key] = table.get(key, Fraction(0)) + coefficient * value
    return {key: ScalarValue.constant(value) for key, value in table.items() if value}


def ahat_table(args, rank=None, curvatures=None):
    """A-hat genus on every subset of args; values are hbar- and u-free."""
    size = len(args)
    log_table = log_ahat_table(args, rank, curvatures)
    return cochain_exp(log_table, size, ScalarValue.one())


def _gl_matrix(R2):
    rank, zeros = R2.rank, (0,) * R2.dim
    matrix = sympy.zeros(rank, rank)
    for a in range(rank):
        for b in range(rank):
            coef = R2.entries[a][b].terms.get((zeros, 1), Fraction(0))
            matrix[a, b] = sympy.Rational(coef.numerator, coef.denominator)
    return matrix


def ch_table(args, rank=None, curvatures=None):
    """
    Chern character tr exp(R2) on every subset of args.

    The degree-2k component carries hbar^k, one per R2 insertion.
    """
    size = len(args)
    matrices = [LieElement.certify(a, rank).matrix for a in args]
    r = matrices[0].rank if matrices else (rank or 1)
    curvatures = curvature_table(matrices) if curvatures is None else curvatures
    base = {key: _gl_matrix(value.r2) for key, value in curvatures.items() if value.r2}
    table = {(): ScalarValue.constant(r)}
    if not base:
        return table
    for k, power in enumerate(matrix_powers(base, size, size // 2), start=1):
        for key, value in matrix_trace_table(power).items():
            table[key] = table.get(key, ScalarValue()) + ScalarValue.constant(value / factorial(k), h=k)
    return {key: value for key, value in table.items() if value}


def _full(table, size):
    return table.get(tuple(range(size)), ScalarValue())


def ahat_eval(args, rank=None):
    if len(args) % 2:
        raise CochainArityError(f"A-hat needs an even number of arguments, got {len(args)}")
    return _full(ahat_table(args, rank), len(args))


def ch_eval(args, rank=None):
    if len(args) % 2:
        raise CochainArityError(f"Ch needs an even number of arguments, got {len(args)}")
    return _full(ch_table(args, rank), len(args))
