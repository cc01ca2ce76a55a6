import pytest

from cyclic import TensorChain, connes_B, hochschild_b
from expectation import (
    EmptyChainError,
    free_expectation,
    insert_arguments,
    interacting_expectation,
    permutation_sign,
    positioned_tensors,
)
from forms import FormElement, d, delta
from liealg import MembershipError
from suites import interacting_closedness
from tracemap import nabla_hbar


def form(dim, exps, h=0, mask=(), u=0, coef=1):
    return FormElement(dim, {(exps, h, mask, u): coef})


def test_free_expectation_of_zero_chain(p):
    assert free_expectation(TensorChain.from_entries([p])) == FormElement.from_weyl(p)


def test_free_expectation_of_squares(p, q):
    chain = TensorChain.from_entries([p.commutative_mul(p), q.commutative_mul(q)])
    assert free_expectation(chain) == form(2, (2, 1), mask=(1,), coef=2)


def test_u_passes_through(p, q):
    chain = TensorChain.from_entries([p, q], u=2)
    assert free_expectation(chain) == free_expectation(TensorChain.from_entries([p, q])).shift(u=2)


def test_positioned_tensors_of_adjacent_pair(p, q):
    chain = TensorChain.from_entries([p, q.commutative_mul(q)])
    (slots,) = [slots for _, _, slots in chain.terms]
    tensors = list(positioned_tensors(slots, 1))
    assert len(tensors) == 2
    assert {t.hbar for t in tensors} == {0, 1}


def test_empty_chain_term_rejected():
    chain = TensorChain(2, 1, {(0, 0, ()): 1})
    with pytest.raises(EmptyChainError):
        free_expectation(chain)


def test_permutation_sign():
    assert permutation_sign((0, 1, 2)) == 1
    assert permutation_sign((1, 0, 2)) == -1
    assert permutation_sign((2, 0, 1)) == 1


def test_insertions_are_antisymmetrized(p, q, unit_chain):
    inserted = insert_arguments([p, q], unit_chain)
    swapped = insert_arguments([q, p], unit_chain)
    assert inserted == -swapped
    assert inserted.lengths() == [3]


def test_interacting_expectation_tree_value(p, q, unit_chain):
    assert interacting_expectation([p, q], unit_chain) == form(2, (0, 0), h=-2, mask=(0, 1))


def test_interacting_rejects_elements_outside_g(p, unit_chain):
    with pytest.raises(MembershipError):
        interacting_expectation([p.shift_hbar(-1)], unit_chain)


def test_free_intertwining(sampler):
    for _ in range(12):
        chain = sampler.chain()
        value = free_expectation(chain)
        assert free_expectation(connes_B(chain)) == d(value)
        assert free_expectation(hochschild_b(chain)) == delta(value).shift(h=1)
        assert nabla_hbar(value) == free_expectation(nabla_hbar(chain))


def test_free_intertwining_rank_two(matrix_sampler):
    for _ in range(6):
        chain = matrix_sampler.chain(matrix_sampler.random.randint(0, 1))
        value = free_expectation(chain)
        assert free_expectation(connes_B(chain)) == d(value)
        assert free_expectation(hochschild_b(chain)) == delta(value).shift(h=1)


@pytest.mark.slow
def test_interacting_identities(sampler):
    for _ in range(6):
        args = [sampler.lie() for _ in range(sampler.random.randint(1, 2))]
        chain = sampler.chain(sampler.random.randint(0, 1), weight=2)
        sign = (-1) ** len(args)
        assert interacting_expectation(args, connes_B(chain)) == d(interacting_expectation(args, chain)).scale(sign)
        assert interacting_closedness(args, chain).is_zero()


def test_interacting_closedness_on_unit(p, q, unit_chain):
    assert interacting_closedness([p, q], unit_chain).is_zero()


def test_dy_count_is_chain_length(sampler):
    for length in (0, 1, 2):
        for _ in range(3):
            value = free_expectation(sampler.chain(length))
            assert all(len(mask) == length for _, _, mask, _ in value.terms)


@pytest.mark.slow
def test_dy_count_includes_insertions(sampler):
    for _ in range(4):
        length = sampler.random.randint(0, 1)
        args = [sampler.lie() for _ in range(sampler.random.randint(1, 2))]
        value = interacting_expectation(args, sampler.chain(length, weight=2))
        assert all(len(mask) == length + len(args) for _, _, mask, _ in value.terms)
