import pytest
from hypothesis import strategies as st

from cyclic import TensorChain
from suites import ElementSampler
from weyl import MatrixElement, WeylElement

DIM = 2


@pytest.fixture
def p():
    return WeylElement.variable(DIM, 0)


@pytest.fixture
def q():
    return WeylElement.variable(DIM, 1)


@pytest.fixture
def hbar():
    return WeylElement.hbar(DIM)


@pytest.fixture
def unit_chain():
    return TensorChain.unit(DIM, 1)


@pytest.fixture
def sampler():
    return ElementSampler(seed=7, n=1, rank=1, max_weight=3, max_chain_length=2)


@pytest.fixture
def matrix_sampler():
    return ElementSampler(seed=11, n=1, rank=2, max_weight=2, max_chain_length=2)


small_coefficients = st.integers(min_value=-3, max_value=3).filter(bool)


@st.composite
def weyl_elements(draw, dim=DIM, max_degree=3, max_terms=3, max_hbar=1):
    """Small WeylElements with integer coefficients."""
    terms = {}
    for _ in range(draw(st.integers(min_value=0, max_value=max_terms))):
        exps = tuple(draw(st.lists(st.integers(0, max_degree), min_size=dim, max_size=dim)))
        h = draw(st.integers(0, max_hbar))
        terms[(exps, h)] = terms.get((exps, h), 0) + draw(small_coefficients)
    return WeylElement(dim, terms)


@st.composite
def matrix_elements(draw, rank=2, max_degree=2):
    rows = [[draw(weyl_elements(max_degree=max_degree, max_terms=2)) for _ in range(rank)] for _ in range(rank)]
    return MatrixElement(DIM, rank, rows)
