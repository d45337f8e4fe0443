"""
Flux decomposition and photon / pair kinematics.

Natural units (hbar = c = 1) throughout; momenta and energies carry the
units of the mass M that is passed in.
"""

import math
from enum import Enum

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator
from scipy import optimize

from ..errors import BelowThresholdError, IncidenceError, KinematicsError
from ..logging_config import get_logger

logger = get_logger(__name__)

# Configuration
TWO_PI = 2.0 * math.pi
NORMAL_INCIDENCE = math.pi / 2.0
ANGLE_TOL = 1e-12
ON_SHELL_TOL = 1e-12


def wrap_angle(phi: float) -> float:
    """Map an angle into [0, 2 pi)."""
    wrapped = math.fmod(phi, TWO_PI)
    if wrapped < 0:
        wrapped += TWO_PI
    return 0.0 if wrapped >= TWO_PI else wrapped


# ============ Types ============

class Polarization(str, Enum):
    S = "s"
    P = "p"


class FluxParam(BaseModel):
    """Flux f (units of the flux quantum) split as f = int_part + delta."""

    model_config = ConfigDict(frozen=True)

    f: float
    int_part: int
    delta: float = Field(ge=0.0, lt=1.0)

    @model_validator(mode="after")
    def _check_split(self) -> "FluxParam":
        if abs(self.int_part + self.delta - self.f) > 1e-12 * max(1.0, abs(self.f)):
            raise ValueError("f must equal int_part + delta")
        return self


class PhotonIn(BaseModel):
    """Incident photon: momentum magnitude, incidence angles and polarization label."""

    model_config = ConfigDict(frozen=True)

    kappa: float = Field(gt=0.0)
    theta_k: float = NORMAL_INCIDENCE
    phi_k: float = 0.0
    polarization: Polarization = Polarization.S

    @field_validator("phi_k")
    @classmethod
    def _wrap(cls, value: float) -> float:
        return wrap_angle(value)

    @property
    def kappa_perp(self) -> float:
        return self.kappa * math.sin(self.theta_k)

    @property
    def is_normal(self) -> bool:
        return abs(self.theta_k - NORMAL_INCIDENCE) < ANGLE_TOL


class PairOut(BaseModel):
    """Created particle (unprimed) and antiparticle (primed) kinematics."""

    model_config = ConfigDict(frozen=True)

    k_perp: float = Field(gt=0.0)
    phi_perp: float = 0.0
    k3: float = 0.0
    kp_perp: float = Field(gt=0.0)
    phip_perp: float = 0.0
    kp3: float = 0.0
    eps: float
    eps_bar: float
    mass: float = Field(gt=0.0)

    @field_validator("phi_perp", "phip_perp")
    @classmethod
    def _wrap(cls, value: float) -> float:
        return wrap_angle(value)

    @model_validator(mode="after")
    def _check_on_shell(self) -> "PairOut":
        if abs(self.kp3 + self.k3) > ON_SHELL_TOL * max(1.0, abs(self.k3)):
            raise ValueError("kp3 must equal -k3")
        expected = math.sqrt(self.k_perp ** 2 + self.k3 ** 2 + self.mass ** 2)
        expected_bar = math.sqrt(self.kp_perp ** 2 + self.kp3 ** 2 + self.mass ** 2)
        if abs(self.eps - expected) > ON_SHELL_TOL * expected or abs(self.eps_bar - expected_bar) > ON_SHELL_TOL * expected_bar:
            raise ValueError("pair energies are not on shell")
        return self

    @property
    def kappa(self) -> float:
        """Photon energy implied by energy conservation."""
        return self.eps + self.eps_bar


# ============ Operations ============

def decompose_flux(f: float) -> FluxParam:
    """Split f into floor(f) and the fractional part delta in [0, 1)."""
    if not math.isfinite(f):
        raise KinematicsError("flux must be finite")
    int_part = math.floor(f)
    delta = f - int_part
    if delta >= 1.0:
        # f just below an integer can round up
        int_part, delta = int_part + 1, 0.0
    return FluxParam(f=f, int_part=int_part, delta=delta)


def solve_pair(
    kappa: float,
    k_perp: float,
    k3: float,
    M: float,
    phi_perp: float = 0.0,
    phip_perp: float = 0.0,
) -> PairOut:
    """
    Fix the antiparticle momentum from energy conservation eps + eps_bar = kappa.

    Args:
        kappa: photon energy
        k_perp, k3: particle transverse and longitudinal momentum
        M: pair mass
        phi_perp, phip_perp: azimuths of the particle and antiparticle

    Raises:
        BelowThresholdError: kappa <= 2M
        KinematicsError: no positive antiparticle transverse momentum exists
    """
    if M <= 0:
        raise KinematicsError("mass must be positive")
    if kappa <= 2.0 * M:
        raise BelowThresholdError(f"below threshold: kappa={kappa:g} <= 2M={2.0 * M:g}")
    if k_perp <= 0:
        raise KinematicsError("k_perp must be positive")

    eps = math.sqrt(k_perp ** 2 + k3 ** 2 + M ** 2)
    if eps >= kappa - M:
        raise KinematicsError(f"no room for the antiparticle: eps={eps:g} >= kappa - M={kappa - M:g}")

    eps_bar = kappa - eps
    kp_perp_sq = eps_bar ** 2 - k3 ** 2 - M ** 2
    if kp_perp_sq <= 0:
        raise KinematicsError("kinematically forbidden: no real antiparticle transverse momentum")

    kp_perp = math.sqrt(kp_perp_sq)
    logger.debug("solve_pair kappa=%g k_perp=%g k3=%g -> kp_perp=%.12g", kappa, k_perp, k3, kp_perp)
    return PairOut(
        k_perp=k_perp, phi_perp=phi_perp, k3=k3,
        kp_perp=kp_perp, phip_perp=phip_perp, kp3=-k3,
        eps=eps, eps_bar=math.sqrt(kp_perp_sq + k3 ** 2 + M ** 2), mass=M,
    )


def momentum_excess_ok(pair: PairOut, photon: PhotonIn) -> bool:
    """True iff the photon's transverse momentum exceeds k_perp + kp_perp."""
    return photon.kappa_perp > pair.k_perp + pair.kp_perp


def require_closed_form_point(pair: PairOut, photon: PhotonIn) -> None:
    """Validate a point for the closed-form paths, naming the violated condition."""
    if not photon.is_normal:
        raise IncidenceError(f"normal incidence required: theta_k={photon.theta_k:g} != pi/2")
    if photon.kappa <= 2.0 * pair.mass:
        raise BelowThresholdError(f"below threshold: kappa={photon.kappa:g} <= 2M={2.0 * pair.mass:g}")
    if abs(pair.kappa - photon.kappa) > ON_SHELL_TOL * photon.kappa:
        raise KinematicsError("energy conservation violated: eps + eps_bar != kappa")
    if not momentum_excess_ok(pair, photon):
        raise KinematicsError("momentum excess violated: kappa_perp <= k_perp + kp_perp")


def pair_from_transverse(
    k_perp: float,
    kp_perp: float,
    kappa: float,
    k3: float = 0.0,
    phi_perp: float = 0.0,
    phip_perp: float = 0.0,
) -> PairOut:
    """
    On-shell pair with prescribed transverse momenta: the mass is solved from
    eps + eps_bar = kappa. Useful for probing the structure functions at
    configurations picked by their transverse momenta alone.
    """
    if kappa <= k_perp + kp_perp:
        raise KinematicsError("momentum excess violated: kappa <= k_perp + kp_perp")

    def excess(mass: float) -> float:
        return math.hypot(k_perp, k3, mass) + math.hypot(kp_perp, k3, mass) - kappa

    if excess(0.0) >= 0:
        raise KinematicsError("no positive mass satisfies energy conservation")
    mass = optimize.brentq(excess, 0.0, kappa, xtol=1e-15, rtol=4 * np.finfo(float).eps)
    eps = math.hypot(k_perp, k3, mass)
    return PairOut(
        k_perp=k_perp, phi_perp=phi_perp, k3=k3,
        kp_perp=kp_perp, phip_perp=phip_perp, kp3=-k3,
        eps=eps, eps_bar=math.hypot(kp_perp, k3, mass), mass=mass,
    )
