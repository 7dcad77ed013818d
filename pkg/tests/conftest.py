import os
import sys
import warnings

import numpy as np
import pytest
from hypothesis import HealthCheck, settings

sys.path.insert(0, os.path.dirname(__file__))

settings.register_profile(
    "default", deadline=None, max_examples=40,
    suppress_health_check=[HealthCheck.too_slow, HealthCheck.data_too_large])
settings.load_profile(os.environ.get("HYPOTHESIS_PROFILE", "default"))

warnings.filterwarnings("ignore", message=".*TBB.*")

from vcsample.core import PointCloud  # noqa: E402
from vcsample.generators import generate_sinc  # noqa: E402


def random_cloud(n, d=2, m=1, seed=0, scale=1.0):
    rng = np.random.default_rng(seed)
    pos = rng.uniform(0.0, scale, size=(n, d))
    vals = rng.normal(size=(n, m))
    return PointCloud(pos, vals)


@pytest.fixture(scope="session")
def sinc50k():
    return generate_sinc(50000, seed=1)


@pytest.fixture
def small_cloud():
    return random_cloud(300, 2, 2, seed=3)
