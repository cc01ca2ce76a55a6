import pytest

from cyclic import (
    TensorBlock,
    TensorChain,
    adjoint_action,
    connes_B,
    hochschild_b,
    nabla,
    shuffle,
    shuffle_positions,
)
from weyl import DimensionMismatchError, MatrixElement, WeylElement, bracket


def test_unit_chain(unit_chain):
    assert unit_chain == TensorChain.from_entries([WeylElement.one(2)])
    assert unit_chain.lengths() == [1]


def test_identity_in_later_slots_is_dropped(p):
    chain = TensorChain.from_entries([p, WeylElement.one(2)])
    assert chain.is_zero()


def test_rank_two_normalization(p):
    E11 = MatrixElement.unit(2, 2, 1, 1)
    E00 = MatrixElement.unit(2, 2, 0, 0)
    head = MatrixElement.scalar(p, 2)
    assert TensorChain.from_entries([head, E11]) == -TensorChain.from_entries([head, E00])


def test_b_of_two_slots(p, q, hbar):
    chain = TensorChain.from_entries([p, q])
    assert hochschild_b(chain) == TensorChain.from_entries([hbar])


def test_B_of_zero_chain(p):
    assert connes_B(TensorChain.from_entries([p])) == TensorChain.from_entries([WeylElement.one(2), p])


def test_B_kills_the_unit(unit_chain):
    assert connes_B(unit_chain).is_zero()


def test_chain_printing(p, q):
    chain = TensorChain.from_entries([p, q], coefficient=2, h=1, u=1)
    assert str(chain) == "2 h^1 u^1 chain [ y1 ; y2 ]"


def test_entries_must_agree():
    with pytest.raises(DimensionMismatchError):
        TensorChain.from_entries([WeylElement.one(2), WeylElement.one(4)])


def test_shuffle_positions_count():
    assert len(list(shuffle_positions(2, 2))) == 6


def test_shuffle_of_single_blocks(p, q):
    a = TensorBlock.from_entries([p])
    b = TensorBlock.from_entries([q])
    assert shuffle(a, b) == TensorBlock.from_entries([p, q]) + TensorBlock.from_entries([q, p])


def test_shuffle_unit(p, q):
    block = TensorBlock.from_entries([p, q])
    assert shuffle(TensorBlock.unit(2, 1), block) == block
    assert str(TensorBlock.from_entries([p])) == "block [ y1 ]"


def test_adjoint_action_is_bracket_on_zero_chains(p, q):
    chain = TensorChain.from_entries([q])
    assert adjoint_action(p, chain) == TensorChain.from_entries([bracket(p, q)])


def test_nabla_on_chains(p, q):
    chain = TensorChain.from_entries([p, q], h=1)
    assert nabla(chain) == chain.scale(2)


def test_b_and_B_identities(sampler):
    for _ in range(15):
        chain = sampler.chain(sampler.random.randint(0, 3))
        assert hochschild_b(hochschild_b(chain)).is_zero()
        assert connes_B(connes_B(chain)).is_zero()
        assert (hochschild_b(connes_B(chain)) + connes_B(hochschild_b(chain))).is_zero()


def test_rank_two_identities(matrix_sampler):
    for _ in range(10):
        chain = matrix_sampler.chain(matrix_sampler.random.randint(0, 1))
        periodic = hochschild_b(chain) + connes_B(chain).shift(u=1)
        assert (hochschild_b(periodic) + connes_B(periodic).shift(u=1)).is_zero()


def random_block(sampler, length):
    return TensorBlock.from_entries([sampler.matrix(sampler.random.randint(1, 2)) for _ in range(length)])


def test_shuffle_is_associative_and_commutative(sampler, matrix_sampler):
    for s in (sampler, matrix_sampler):
        for _ in range(5):
            a, b, c = (random_block(s, s.random.randint(1, 2)) for _ in range(3))
            assert shuffle(shuffle(a, b), c) == shuffle(a, shuffle(b, c))
            assert shuffle(a, b) == shuffle(b, a)


def test_unit_chain_is_the_identity_matrix():
    assert TensorChain.unit(2, 3) == TensorChain.from_entries([MatrixElement.identity(2, 3)])
    assert TensorChain.unit(2, 3).lengths() == [1]
