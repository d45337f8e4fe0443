import math

import pytest

from src.config import QuadratureConfig
from src.physics.kinematics import PhotonIn, decompose_flux, solve_pair


@pytest.fixture
def cfg():
    return QuadratureConfig()


@pytest.fixture
def flux():
    return decompose_flux(0.3)


@pytest.fixture
def photon():
    return PhotonIn(kappa=3.0, phi_k=1.0)


@pytest.fixture
def pair():
    """kappa = 3, k_perp = 0.8, k3 = 0.2, M = 1; k'_perp comes out near 1.365."""
    return solve_pair(3.0, 0.8, 0.2, 1.0, phi_perp=0.4, phip_perp=2.1)


@pytest.fixture
def symmetric_angles():
    return math.pi / 6, math.pi / 6
