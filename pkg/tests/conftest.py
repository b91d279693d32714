import numpy as np
import pytest
from hypothesis import HealthCheck, settings
from hypothesis import strategies as st

from linrel.config import ExperimentConfig
from linrel.forms import Form
from linrel.subspace import Subspace, span
from linrel.utils import haar_orthogonal, random_matrix

settings.register_profile(
    "linrel",
    deadline=None,
    max_examples=40,
    suppress_health_check=[HealthCheck.too_slow],
)
settings.load_profile("linrel")

fields = st.sampled_from(["real", "complex"])
seeds = st.integers(min_value=0, max_value=2 ** 31 - 1)


def random_subspace(rng, n, k, field="real"):
    if k == 0:
        return Subspace.zero(n, field)
    return span(random_matrix(rng, (n, k), field), field)


def random_form(rng, n, field="real"):
    """Nondegenerate general form with singular values in [0.5, 2]"""
    V = haar_orthogonal(n, field, rng)
    W = haar_orthogonal(n, field, rng)
    return Form(V @ np.diag(rng.uniform(0.5, 2.0, n)) @ W, field)


def line(theta):
    return span(np.array([[np.cos(theta)], [np.sin(theta)]]))


@pytest.fixture
def rng():
    return np.random.default_rng(1234)


@pytest.fixture
def small_config():
    return ExperimentConfig(trials=4, seed=7, max_dim=4, samples=200, steps=4)
