import logging
import random
from dataclasses import dataclass, field

from cyclic import TensorChain, adjoint_action, connes_B, hochschild_b
from expectation import free_expectation, interacting_expectation
from forms import FormElement, FormTensor, ScalarValue, bv_integrate, d, delta, iota_pi, tensor_apply
from liealg import ce_differential_eval
from tracemap import cocycle_residual, gm_residual, h_invariance_residual, nabla_hbar, universal_trace
from weyl import MatrixElement, WeylElement, bracket, moyal_mul, truncate_to_weight, weight_components

logger = logging.getLogger(__name__)

# Longest chain drawn by the interacting and trace suites
INTERACTING_CHAIN_LENGTH = 2


class ElementSampler:
    """
    Seeded generator of small homogeneous elements, matrices, forms and chains.

    Coefficients are nonzero integers in [-3, 3]; the seed fixes every draw.
    """
    def __init__(self, seed, n, rank, max_weight, max_chain_length=3):
        self.random = random.Random(seed)
        self.n = n
        self.dim = 2 * n
        self.rank = rank
        self.max_weight = max_weight
        self.max_chain_length = max_chain_length

    def coefficient(self):
        return self.random.choice([-3, -2, -1, 1, 2, 3])

    def exponents(self, degree):
        exps = [0] * self.dim
        for _ in range(degree):
            exps[self.random.randrange(self.dim)] += 1
        return tuple(exps)

    def weyl(self, weight=None, terms=2, hbar=True):
        """A weight-homogeneous WeylElement with up to `terms` terms."""
        weight = self.random.randint(0, self.max_weight) if weight is None else weight
        result = {}
        for _ in range(self.random.randint(1, terms)):
            h = self.random.randint(0, weight // 2) if hbar else 0
            key = (self.exponents(weight - 2 * h), h)
            result[key] = result.get(key, 0) + self.coefficient()
        return WeylElement(self.dim, result)

    def matrix(self, weight=None, density=0.5):
        zero = WeylElement(self.dim)
        rows = [
            [self.weyl(weight) if self.random.random() < density or (a, b) == (0, 0) else zero
             for b in range(self.rank)]
            for a in range(self.rank)
        ]
        return MatrixElement.from_rows(rows)

    def lie(self):
        """An element f Id + hbar A of g, cut off above max_weight."""
        f = self.weyl(self.random.randint(1, self.max_weight), hbar=False)
        element = MatrixElement.scalar(f, self.rank)
        if self.random.random() < 0.5:
            A = self.matrix(self.random.randint(0, max(0, self.max_weight - 2)), density=0.3)
            element = element + A.shift_hbar(1)
        return truncate_to_weight(element, self.max_weight)

    def h_element(self):
        """An element of h: quadratic scalar, hbar times a constant matrix, constants."""
        quadratic = self.weyl(2, hbar=False)
        constants = MatrixElement(self.dim, self.rank, [
            [WeylElement.constant(self.dim, self.random.randint(-2, 2), h=1) for _ in range(self.rank)]
            for _ in range(self.rank)
        ])
        central = WeylElement.constant(self.dim, self.random.randint(-2, 2), h=self.random.randint(0, 2))
        return MatrixElement.scalar(quadratic + central, self.rank) + constants

    def form(self, weight=None):
        f = self.weyl(weight, terms=2)
        mask = tuple(sorted(self.random.sample(range(self.dim), self.random.randint(0, min(2, self.dim)))))
        u = self.random.randint(0, 1)
        return FormElement(f.dim, {(exps, h, mask, u): coef for (exps, h), coef in f.terms.items()})

    def chain_length(self, cap=None):
        """A random chain length in 0..max_chain_length, never above cap."""
        top = self.max_chain_length if cap is None else min(cap, self.max_chain_length)
        return self.random.randint(0, top)

    def chain(self, length=None, weight=None):
        length = self.chain_length() if length is None else length
        entries = [self.matrix(weight, density=0.4) for _ in range(length + 1)]
        return TensorChain.from_entries(entries, u=self.random.randint(0, 1))


@dataclass
class IdentityResult:
    """Outcome of one identity over all sampled cases."""
    suite: str
    name: str
    cases: int
    failures: list = field(default_factory=list)

    @property
    def passed(self):
        return not self.failures

    def smallest_failure(self):
        """Text of the failing instance with the fewest terms."""
        if not self.failures:
            return None
        return min(self.failures, key=lambda instance: (instance.size, len(instance.text))).text

    def line(self):
        status = "PASS" if self.passed else "FAIL"
        return f"{status}\t{self.suite}.{self.name}\t{self.cases}"


@dataclass(frozen=True)
class Instance:
    """A sampled input as printed, with its total number of terms."""
    text: str
    size: int

    def __str__(self):
        return self.text


def term_count(value):
    if isinstance(value, (list, tuple)):
        return sum(term_count(v) for v in value)
    if isinstance(value, MatrixElement):
        return sum(len(entry.terms) for row in value.entries for entry in row)
    terms = getattr(value, "terms", None)
    return 1 if terms is None else len(terms)


def describe(*values):
    return Instance(" | ".join(str(v) for v in values), sum(term_count(v) for v in values))


# weyl

def _associativity(s):
    f, g, h = s.matrix(), s.matrix(), s.matrix()
    ok = moyal_mul(moyal_mul(f, g), h) == moyal_mul(f, moyal_mul(g, h))
    return ok, describe(f, g, h)


def _jacobi(s):
    f, g, h = s.matrix(), s.matrix(), s.matrix()
    total = bracket(f, bracket(g, h)) + bracket(g, bracket(h, f)) + bracket(h, bracket(f, g))
    return total.is_zero(), describe(f, g, h)


def _weight_additivity(s):
    f, g = s.weyl(), s.weyl()
    if not (f and g):
        return True, describe()
    (wf, _), = weight_components(f)
    (wg, _), = weight_components(g)
    weights = [w for w, _ in weight_components(moyal_mul(f, g))]
    return weights in ([], [wf + wg]), describe(f, g)


def _commutator(s):
    f, g = s.matrix(), s.matrix()
    ok = moyal_mul(f, g) - moyal_mul(g, f) == bracket(f, g).shift_hbar(1)
    return ok, describe(f, g)


def _centrality(s):
    f = s.matrix()
    c = MatrixElement.scalar(WeylElement.constant(s.dim, s.coefficient(), h=s.random.randint(-1, 2)), s.rank)
    return bracket(f, c).is_zero(), describe(f, c)


# forms

def _d_squared(s):
    omega = s.form()
    return d(d(omega)).is_zero(), describe(omega)


def _delta_squared(s):
    omega = s.form()
    return delta(delta(omega)).is_zero(), describe(omega)


def _delta_commutator(s):
    omega = s.form()
    return delta(omega) == d(iota_pi(omega)) - iota_pi(d(omega)), describe(omega)


def _d_derivation(s):
    alpha, beta = s.form(), s.form()
    degrees = {len(mask) % 2 for (_, _, mask, _) in alpha.terms}
    if len(degrees) > 1:
        return True, describe()
    sign = -1 if degrees == {1} else 1
    lhs = d(alpha.wedge(beta))
    rhs = d(alpha).wedge(beta) + alpha.wedge(d(beta)).scale(sign)
    return lhs == rhs, describe(alpha, beta)


def _bv_cochain_map(s):
    omega = s.form()
    image = delta(omega).shift(h=1) + d(omega).shift(u=1)
    return bv_integrate(image).is_zero(), describe(omega)


def _tensor_d_squared(s):
    factors = [s.form() for _ in range(s.random.randint(1, 3))]
    t = FormTensor.from_factors(factors)
    return tensor_apply("d", tensor_apply("d", t)).is_zero(), describe(*factors)


def _tensor_multiply_out(s):
    factors = [s.form() for _ in range(s.random.randint(1, 3))]
    t = FormTensor.from_factors(factors)
    product = t.multiply_out()
    ok = all([
        tensor_apply("d", t).multiply_out() == d(product),
        tensor_apply("iota_pi", t).multiply_out() == iota_pi(product),
        tensor_apply("delta", t).multiply_out() == delta(product),
    ])
    return ok, describe(*factors)


# cyclic

def _b_squared(s):
    c = s.chain(s.random.randint(0, 3))
    return hochschild_b(hochschild_b(c)).is_zero(), describe(c)


def _B_squared(s):
    c = s.chain(s.random.randint(0, 3))
    return connes_B(connes_B(c)).is_zero(), describe(c)


def _bB_anticommute(s):
    c = s.chain(s.random.randint(0, 3))
    return (hochschild_b(connes_B(c)) + connes_B(hochschild_b(c))).is_zero(), describe(c)


def _periodic_squared(s):
    c = s.chain(s.random.randint(0, 3))
    once = hochschild_b(c) + connes_B(c).shift(u=1)
    twice = hochschild_b(once) + connes_B(once).shift(u=1)
    return twice.is_zero(), describe(c)


# free expectation

def _free_B(s):
    c = s.chain()
    return free_expectation(connes_B(c)) == d(free_expectation(c)), describe(c)


def _free_b(s):
    c = s.chain()
    return free_expectation(hochschild_b(c)) == delta(free_expectation(c)).shift(h=1), describe(c)


def _free_nabla(s):
    c = s.chain()
    value = free_expectation(c)
    ok = nabla_hbar(value) == free_expectation(nabla_hbar(c))
    ok = ok and nabla_hbar(bv_integrate(value)) == bv_integrate(nabla_hbar(value))
    return ok, describe(c)


# interacting expectation

def _interacting_antisymmetry(s):
    a, b = s.lie(), s.lie()
    c = s.chain(s.chain_length(INTERACTING_CHAIN_LENGTH), weight=min(2, s.max_weight))
    ok = interacting_expectation([a, b], c) == -interacting_expectation([b, a], c)
    return ok, describe(a, b, c)


def _interacting_B(s):
    args = [s.lie() for _ in range(s.random.randint(0, 2))]
    c = s.chain(s.chain_length(INTERACTING_CHAIN_LENGTH), weight=min(2, s.max_weight))
    lhs = interacting_expectation(args, connes_B(c))
    rhs = d(interacting_expectation(args, c)).scale((-1) ** len(args))
    return lhs == rhs, describe(*args, c)


def interacting_closedness(args, c):
    """CE(F)(args)(c) + (-1)^K F(args)(b c) - hbar Delta F(args)(c)."""
    zero = FormElement.zero(c.dim)

    def action(a, rest):
        return -interacting_expectation(rest, adjoint_action(a, c))

    differential = ce_differential_eval(lambda sub: interacting_expectation(sub, c), args, action, zero)
    boundary = interacting_expectation(args, hochschild_b(c)).scale((-1) ** len(args))
    return differential + boundary - delta(interacting_expectation(args, c)).shift(h=1)


def _interacting_closed(s):
    args = [s.lie() for _ in range(s.random.randint(1, 2))]
    c = s.chain(s.chain_length(INTERACTING_CHAIN_LENGTH), weight=min(2, s.max_weight))
    return interacting_closedness(args, c).is_zero(), describe(*args, c)


# trace

def _trace_vanishes_on_h(s):
    x = s.h_element()
    rest = [s.lie() for _ in range(s.random.randint(0, 1))]
    c = s.chain(s.chain_length(INTERACTING_CHAIN_LENGTH), weight=min(2, s.max_weight))
    return universal_trace([x] + rest, c).is_zero(), describe(x, *rest, c)


def _trace_cocycle(s):
    args = [s.lie() for _ in range(s.random.randint(0, 2))]
    c = s.chain(s.chain_length(INTERACTING_CHAIN_LENGTH), weight=min(2, s.max_weight))
    return cocycle_residual(args, c).is_zero(), describe(*args, c)


def _trace_partition(s):
    value = universal_trace([], TensorChain.unit(s.dim, s.rank))
    return value == ScalarValue.constant(s.rank, u=s.n), describe(value)


def _trace_parity(s):
    args = [s.lie() for _ in range(s.random.randint(0, 2))]
    c = s.chain(s.chain_length(INTERACTING_CHAIN_LENGTH), weight=min(2, s.max_weight))
    odd = TensorChain(c.dim, c.rank, {
        key: coef for key, coef in c.terms.items() if (len(key[2]) - 1 + len(args)) % 2
    })
    return universal_trace(args, odd).is_zero(), describe(*args, odd)


def _trace_h_invariance(s):
    x = s.h_element()
    args = [s.lie() for _ in range(s.random.randint(0, 2))]
    c = s.chain(0, weight=min(2, s.max_weight))
    return h_invariance_residual(x, args, c).is_zero(), describe(x, *args, c)


# Gauss-Manin

def _gm_pairs(s):
    a, b = s.lie(), s.lie()
    return gm_residual([a, b]).is_zero(), describe(a, b)


SUITES = {
    "weyl": [
        ("associativity", _associativity),
        ("jacobi", _jacobi),
        ("weight_additivity", _weight_additivity),
        ("bracket_is_commutator", _commutator),
        ("centrality", _centrality),
    ],
    "forms": [
        ("d_squared", _d_squared),
        ("delta_squared", _delta_squared),
        ("delta_is_graded_commutator", _delta_commutator),
        ("d_is_odd_derivation", _d_derivation),
        ("bv_integral_is_cochain_map", _bv_cochain_map),
        ("tensor_d_squared", _tensor_d_squared),
        ("tensor_operators_multiply_out", _tensor_multiply_out),
    ],
    "cyclic": [
        ("b_squared", _b_squared),
        ("B_squared", _B_squared),
        ("bB_anticommute", _bB_anticommute),
        ("periodic_squared", _periodic_squared),
    ],
    "free": [
        ("B_intertwines_d", _free_B),
        ("b_intertwines_hbar_delta", _free_b),
        ("nabla_flatness", _free_nabla),
    ],
    "interacting": [
        ("antisymmetry", _interacting_antisymmetry),
        ("B_intertwines_d", _interacting_B),
        ("closedness", _interacting_closed),
    ],
    "trace": [
        ("vanishes_on_h", _trace_vanishes_on_h),
        ("cocycle", _trace_cocycle),
        ("partition_value", _trace_partition),
        ("parity", _trace_parity),
        ("h_invariance", _trace_h_invariance),
    ],
    "gm": [
        ("gauss_manin_pairs", _gm_pairs),
    ],
}


def run_suite(name, sampler, cases):
    """
    Run every identity of a suite on `cases` sampled instances.

    Args:
        name (str): Suite name, a key of SUITES
        sampler (ElementSampler): Seeded sampler
        cases (int): Cases per identity

    Returns:
        list: IdentityResult per identity, in suite order
    """
    if name not in SUITES:
        raise KeyError(f"unknown suite {name!r}")
    results = []
    for identity, check in SUITES[name]:
        result = IdentityResult(name, identity, cases)
        for case in range(cases):
            ok, instance = check(sampler)
            if not ok:
                logger.error(f"{name}.{identity} failed on case {case}: {instance}")
                result.failures.append(instance)
        logger.info(f"{name}.{identity}: {cases - len(result.failures)}/{cases} passed")
        results.append(result)
    return results
