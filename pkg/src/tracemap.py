import logging
from dataclasses import dataclass, field
from fractions import Fraction

from configspace import wheel_coefficient
from cyclic import TensorChain, adjoint_action, connes_B, hochschild_b
from cyclic import nabla as chain_nabla
from expectation import interacting_expectation
from forms import FormElement, ScalarValue, bv_integrate
from forms import nabla as form_nabla
from liealg import (
    ahat_table,
    ce_differential_eval,
    certify_all,
    ch_table,
    cochain_exp,
    cup,
    curvature_table,
    gamma_hat,
    log_ahat_table,
    matrix_powers,
    matrix_trace_table,
    rescale_u,
    shuffle_sign,
    sp_matrix,
    subsets,
)
from weyl import MatrixElement, WeylElement, bracket

logger = logging.getLogger(__name__)

TraceValue = ScalarValue


def _signed(value, sign):
    return value if sign > 0 else -value


def universal_trace(args, c, use_gamma=False):
    """
    The universal trace: BV integral of the interacting expectation.

    Args:
        args (list): Elements of g
        c (TensorChain): Periodic cyclic chain
        use_gamma (bool): Insert gamma_hat(a) instead of a; the value is the same

    Returns:
        TraceValue: Element of C((hbar))[u, 1/u]
    """
    matrices = certify_all(args, c.rank)
    if use_gamma:
        matrices = [gamma_hat(a) for a in matrices]
    value = bv_integrate(interacting_expectation(matrices, c))
    logger.debug(f"trace on {len(matrices)} args, chain lengths {c.lengths()}: {value}")
    return value


def cocycle_residual(args, c):
    """
    (d_Lie Tr)(args)(c) + (-1)^K Tr(args)((b + uB) c); zero when the trace is a cocycle.

    The g-action on chain-valued cochains is phi -> -phi(a . c).
    """
    matrices = certify_all(args, c.rank)
    K = len(matrices)

    def cochain(sub):
        return universal_trace(sub, c)

    def action(a, rest):
        return -universal_trace(rest, adjoint_action(a, c))

    differential = ce_differential_eval(cochain, matrices, action, ScalarValue())
    boundary = hochschild_b(c) + connes_B(c).shift(u=1)
    return differential + _signed(universal_trace(matrices, boundary), (-1) ** K)


def h_invariance_residual(x, args, c):
    """sum_j Tr(.. [x, a_j] ..)(c) + Tr(args)(x . c); zero for x in h."""
    matrices = certify_all(args, c.rank)
    X = certify_all([x], c.rank)[0]
    total = universal_trace(matrices, adjoint_action(X, c))
    for j, a in enumerate(matrices):
        moved = matrices[:j] + [bracket(X, a)] + matrices[j + 1:]
        total = total + universal_trace(moved, c)
    return total


def _nabla_weyl(f):
    return WeylElement(f.dim, {
        (exps, h): coef * (h + Fraction(sum(exps), 2)) for (exps, h), coef in f.terms.items()
    })


def nabla_hbar(v):
    """
    The hbar-connection hbar d/dhbar + (1/2) sum y^i d/dy^i.

    Each term is multiplied by (hbar power + (y-degree + dy-degree) / 2); on
    K-values this is hbar d/dhbar.
    """
    if isinstance(v, ScalarValue):
        return ScalarValue({(h, u): coef * h for (h, u), coef in v.terms.items()})
    if isinstance(v, WeylElement):
        return _nabla_weyl(v)
    if isinstance(v, MatrixElement):
        return v.map_entries(_nabla_weyl)
    if isinstance(v, FormElement):
        return form_nabla(v)
    if isinstance(v, TensorChain):
        return chain_nabla(v)
    raise TypeError(f"nabla_hbar does not act on {type(v).__name__}")


def _scalar_value(w):
    """A pure-hbar WeylElement as a K-value."""
    return ScalarValue({(h, 0): coef for (exps, h), coef in w.terms.items() if not any(exps)})


def _central_table(curvatures, transform):
    return {
        key: transform(_scalar_value(value.r3).shift(h=-1, u=-1))
        for key, value in curvatures.items() if value.r3
    }


def _trace_table(matrices, chain):
    table = {}
    for subset in subsets(len(matrices)):
        value = universal_trace([matrices[i] for i in subset], chain)
        if value:
            table[subset] = value
    return table


def gm_residual(args, dim=None, rank=None):
    """
    Gauss-Manin identity at args:
    nabla Tr(1) + nabla(R3 / u hbar) cup Tr(1) - d_Lie G,
    with G(b) = u^{-1} sum_i (-1)^{i-1} Tr(b without b_i)(nabla(gamma_hat(b_i) / hbar)).

    Args:
        args (list): Elements of g
        dim (int): 2n, needed only when args is empty
        rank (int): Matrix rank

    Returns:
        TraceValue: Zero when the identity holds
    """
    matrices = certify_all(args, rank)
    if matrices:
        dim, rank = matrices[0].dim, matrices[0].rank
    elif dim is None:
        raise ValueError("gm_residual needs dim when args is empty")
    rank = rank or 1
    unit = TensorChain.unit(dim, rank)
    size = len(matrices)
    full = tuple(range(size))

    lhs = nabla_hbar(universal_trace(matrices, unit))

    curvatures = curvature_table(matrices)
    central = _central_table(curvatures, nabla_hbar)
    curved = ScalarValue()
    for pair, value in central.items():
        rest = tuple(i for i in full if i not in pair)
        traced = universal_trace([matrices[i] for i in rest], unit)
        curved = curved + _signed(value * traced, shuffle_sign(pair, full))

    def primitive(bs):
        total = ScalarValue()
        for i, b in enumerate(bs):
            source = nabla_hbar(gamma_hat(b).shift_hbar(-1))
            if source.is_zero():
                continue
            chain = TensorChain.from_entries([source])
            total = total + _signed(universal_trace(bs[:i] + bs[i + 1:], chain), (-1) ** i)
        return total.shift(u=-1)

    exact = ce_differential_eval(primitive, matrices, "trivial", ScalarValue())
    return lhs + curved - exact


def _wheel_log_table(curvatures, size):
    """Log A-hat predicted by the wheel sum: sum_k w(k)/k tr(R1^{cup k}) u^{-k}."""
    base = {key: sp_matrix(value.r1) for key, value in curvatures.items() if value.r1}
    table = {}
    if not base:
        return table
    for k, power in enumerate(matrix_powers(base, size, size // 2), start=1):
        if k < 2:
            continue
        weight = wheel_coefficient(k) / k
        if not weight:
            continue
        for key, value in matrix_trace_table(power).items():
            table[key] = table.get(key, ScalarValue()) + ScalarValue.constant(weight * value, u=-k)
    return {key: value for key, value in table.items() if value}


def _chern_rescale(degree):
    k = degree // 2
    return ScalarValue.constant((-1) ** k, h=-k, u=-k)


@dataclass
class IndexReport:
    """Both sides of the universal index formula at one argument list."""
    degree: int
    n: int
    rank: int
    args: list
    trace: ScalarValue
    formula: ScalarValue
    dressed_leading: ScalarValue
    dressed_remainder: ScalarValue
    dressed_formula: ScalarValue
    log_ahat_side: ScalarValue = None
    wheel_side: ScalarValue = None
    notes: list = field(default_factory=list)

    @property
    def difference(self):
        return self.dressed_leading - self.dressed_formula

    def holds(self):
        return self.difference.is_zero() and self.dressed_remainder.is_zero()

    def lines(self):
        rows = [
            ("degree", self.degree),
            ("n", self.n),
            ("r", self.rank),
            ("args", " ; ".join(self.args) if self.args else "(none)"),
            ("trace", self.trace),
            ("formula", self.formula),
            ("dressed trace", self.dressed_leading),
            ("dressed trace, other hbar orders", self.dressed_remainder),
            ("dressed formula", self.dressed_formula),
            ("difference", self.difference),
        ]
        if self.wheel_side is not None:
            ratio = self.wheel_side.ratio(self.log_ahat_side) if self.log_ahat_side else None
            rows.extend([
                ("log-ahat side", self.log_ahat_side),
                ("wheel side", self.wheel_side),
                ("wheel/log-ahat ratio", ratio if ratio is not None else "undefined"),
            ])
        rows.extend(("note", note) for note in self.notes)
        return [f"{name}\t{value}" for name, value in rows]


def _arg_text(M):
    return str(M.entries[0][0]) if M.rank == 1 else str(M)


def index_report(degree, args, dim, rank):
    """
    Compare e^{R3/u hbar} cup Tr(1) with u^n (A-hat_u cup Ch_u) at args.

    Args:
        degree (int): Number of arguments
        args (list): Elements of g
        dim (int): 2n
        rank (int): Matrix rank

    Returns:
        IndexReport: Both sides, the dressed comparison and, from degree 4 on,
        the wheel-sum check of the log A-hat normalization
    """
    matrices = certify_all(args, rank)
    if len(matrices) != degree:
        raise ValueError(f"index degree {degree} needs {degree} args, got {len(matrices)}")
    n = dim // 2
    size = degree
    full = tuple(range(size))
    unit = TensorChain.unit(dim, rank)
    volume = ScalarValue.constant(1, u=n)

    curvatures = curvature_table(matrices)
    traces = _trace_table(matrices, unit)
    central = _central_table(curvatures, lambda value: value)
    dressing = cochain_exp(central, size, ScalarValue.one())
    undressing = cochain_exp({key: -value for key, value in central.items()}, size, ScalarValue.one())

    ahat_u = rescale_u(ahat_table(matrices, curvatures=curvatures))
    ch_u = rescale_u(ch_table(matrices, curvatures=curvatures), _chern_rescale)
    characteristic = cup(ahat_u, ch_u, size)

    full_of = lambda table: table.get(full, ScalarValue())
    dressed = full_of(cup(dressing, traces, size))
    leading = dressed.hbar_part(0)
    report = IndexReport(
        degree=degree,
        n=n,
        rank=rank,
        args=[_arg_text(M) for M in matrices],
        trace=full_of(traces),
        formula=full_of(cup(undressing, characteristic, size)) * volume,
        dressed_leading=leading,
        dressed_remainder=dressed - leading,
        dressed_formula=full_of(characteristic) * volume,
    )
    if degree >= 4:
        report.log_ahat_side = full_of(rescale_u(log_ahat_table(matrices, curvatures=curvatures)))
        report.wheel_side = full_of(_wheel_log_table(curvatures, size))
        report.notes.append(
            "R1 enters log A-hat through the bracket action on span(y); "
            "the wheel/log-ahat ratio measures the R1 normalization")
    logger.info(f"index report at degree {degree}: difference {report.difference}")
    return report
