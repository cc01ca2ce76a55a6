from fractions import Fraction

import pytest

from cyclic import TensorChain
from forms import ScalarValue
from tracemap import (
    cocycle_residual,
    gm_residual,
    h_invariance_residual,
    index_report,
    nabla_hbar,
    universal_trace,
)
from weyl import MatrixElement


def test_trace_of_unit_is_rank_times_volume():
    assert universal_trace([], TensorChain.unit(2, 1)) == ScalarValue.constant(1, u=1)
    assert universal_trace([], TensorChain.unit(4, 3)) == ScalarValue.constant(3, u=2)


def test_tree_level_value(p, q, unit_chain):
    assert universal_trace([p, q], unit_chain) == ScalarValue.constant(-1, h=-1)
    assert universal_trace([q, p], unit_chain) == ScalarValue.constant(1, h=-1)


def test_cubic_pair(p, q, unit_chain):
    p3 = p.commutative_mul(p).commutative_mul(p)
    q3 = q.commutative_mul(q).commutative_mul(q)
    assert universal_trace([p3, q3], unit_chain) == ScalarValue.constant(Fraction(-3, 2), h=1)


def test_bundle_pair(p, q):
    args = [MatrixElement.scalar(p, 2), MatrixElement.unit(2, 2, 0, 0, q.shift_hbar(1))]
    assert universal_trace(args, TensorChain.unit(2, 2)) == ScalarValue.constant(-1)


def test_trace_vanishes_on_h(p, q, unit_chain):
    p2 = p.commutative_mul(p)
    assert universal_trace([p2, q], unit_chain).is_zero()
    assert universal_trace([p2, q], unit_chain, use_gamma=True).is_zero()


def test_gamma_variant_agrees(p, q, unit_chain):
    a = p + p.commutative_mul(q)
    assert universal_trace([a, q], unit_chain, use_gamma=True) == universal_trace([a, q], unit_chain)


def test_odd_total_degree_vanishes(p, q):
    assert universal_trace([p], TensorChain.from_entries([q])).is_zero()


def test_nabla_on_values():
    assert nabla_hbar(ScalarValue.constant(3, h=2, u=1)) == ScalarValue.constant(6, h=2, u=1)
    with pytest.raises(TypeError):
        nabla_hbar(3)


def test_cocycle_on_coordinates(p, q, unit_chain):
    assert cocycle_residual([p, q], unit_chain).is_zero()
    assert cocycle_residual([p], TensorChain.from_entries([q])).is_zero()


def test_gauss_manin_on_pairs(p, q, sampler):
    assert gm_residual([p, q]).is_zero()
    assert gm_residual([], dim=2, rank=1).is_zero()
    with pytest.raises(ValueError, match="dim"):
        gm_residual([])
    for _ in range(5):
        assert gm_residual([sampler.lie(), sampler.lie()]).is_zero()


@pytest.mark.slow
def test_cocycle_and_invariance(sampler):
    for _ in range(5):
        args = [sampler.lie() for _ in range(sampler.random.randint(0, 2))]
        chain = sampler.chain(sampler.random.randint(0, 1), weight=2)
        assert cocycle_residual(args, chain).is_zero()
        x = sampler.h_element()
        assert h_invariance_residual(x, args, sampler.chain(0, weight=2)).is_zero()


def test_index_report_degree_two(p, q):
    report = index_report(2, [p, q], 2, 1)
    assert report.holds()
    assert report.trace == ScalarValue.constant(-1, h=-1)
    assert "difference\t0" in report.lines()
    assert report.wheel_side is None


def test_index_report_bundle_case(p, q):
    args = [MatrixElement.scalar(p, 2), MatrixElement.unit(2, 2, 0, 0, q.shift_hbar(1))]
    report = index_report(2, args, 2, 2)
    assert report.holds()


def test_index_report_needs_matching_degree(p):
    with pytest.raises(ValueError):
        index_report(2, [p], 2, 1)


@pytest.mark.slow
def test_index_report_degree_four(p, q):
    q2 = q.commutative_mul(q)
    args = [p, p.commutative_mul(q2), q, p.commutative_mul(p).commutative_mul(q)]
    report = index_report(4, args, 2, 1)
    lines = report.lines()
    assert any(line.startswith("wheel/log-ahat ratio\t") for line in lines)
    assert any(line.startswith("note\t") for line in lines)
    assert report.log_ahat_side is not None
