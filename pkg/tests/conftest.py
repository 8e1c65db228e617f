import numpy as np
import pytest
from hypothesis import HealthCheck, settings
from hypothesis import strategies as st

from matconcave.linalg import ginibre, random_density, random_hermitian, random_pd

settings.register_profile(
    "default", max_examples=40, deadline=None,
    suppress_health_check=[HealthCheck.too_slow],
)
settings.load_profile("default")

seeds = st.integers(min_value=0, max_value=2**32 - 1)
dims = st.integers(min_value=1, max_value=5)
weights = st.floats(min_value=0.05, max_value=0.95)
exponents = st.floats(min_value=0.02, max_value=0.98)


@st.composite
def pd_matrices(draw, n=None, max_cond=1e4):
    n = draw(dims) if n is None else n
    rng = np.random.default_rng(draw(seeds))
    return random_pd(rng, n, max_cond).matrix


@st.composite
def pd_with_direction(draw, hermitian=False):
    """A PD matrix and a same-size direction matrix."""
    n = draw(dims)
    rng = np.random.default_rng(draw(seeds))
    A = random_pd(rng, n, 1e4).matrix
    K = random_hermitian(rng, n) if hermitian else ginibre(rng, n)
    return A, K


@st.composite
def density_pairs(draw):
    n = draw(dims)
    rng = np.random.default_rng(draw(seeds))
    return random_density(rng, n).matrix, random_density(rng, n).matrix


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)
