import numpy as np
import pytest
from hypothesis import HealthCheck, settings

from kdrep.frame import BasisPair, build_frame

settings.register_profile(
    "default",
    max_examples=40,
    deadline=None,
    suppress_health_check=[HealthCheck.too_slow],
)
settings.load_profile("default")

HADAMARD = np.array([[1, 1], [1, -1]], dtype=complex) / np.sqrt(2)
KET0 = np.array([1, 0], dtype=complex)
KET1 = np.array([0, 1], dtype=complex)
KETP = np.array([1, 1], dtype=complex) / np.sqrt(2)
KETM = np.array([1, -1], dtype=complex) / np.sqrt(2)


def proj(v):
    v = np.asarray(v, dtype=complex)
    return np.outer(v, v.conj())


@pytest.fixture()
def zx_frame():
    return build_frame(BasisPair.zx())


@pytest.fixture()
def rng():
    return np.random.default_rng(1234)
