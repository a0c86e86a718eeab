import numpy as np
import pytest

from qig_kit.core.config import Guards
from qig_kit.geometry.metric_source import MetricSource
from qig_kit.models.geometry_models import THETA_SINGULAR, THETA_STAR


@pytest.fixture
def rng():
    return np.random.default_rng(42)


@pytest.fixture
def theta_star():
    return np.array(THETA_STAR)


@pytest.fixture
def theta_singular():
    return np.array(THETA_SINGULAR)


@pytest.fixture
def guards():
    return Guards()


@pytest.fixture
def sld_source():
    return MetricSource.named("sld")


def random_density2(rng, r_min=0.05, r_max=0.95):
    """Qubit density matrix with Bloch radius in [r_min, r_max]."""
    direction = rng.normal(size=3)
    direction /= np.linalg.norm(direction)
    r_vec = rng.uniform(r_min, r_max) * direction
    X = np.array([[0, 1], [1, 0]], dtype=complex)
    Y = np.array([[0, -1j], [1j, 0]])
    Z = np.diag([1.0, -1.0]).astype(complex)
    rho = 0.5 * (np.eye(2) + r_vec[0] * X + r_vec[1] * Y + r_vec[2] * Z)
    return r_vec, rho


def bloch_tangent_to_drho(dr):
    X = np.array([[0, 1], [1, 0]], dtype=complex)
    Y = np.array([[0, -1j], [1j, 0]])
    Z = np.diag([1.0, -1.0]).astype(complex)
    return 0.5 * (dr[0] * X + dr[1] * Y + dr[2] * Z)
