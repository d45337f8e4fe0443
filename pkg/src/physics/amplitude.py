"""
Closed-form pair-production amplitude and its structure functions.

The amplitude is the reduced, box-size-free vector d = (d1, d2, dz) along
e1 = e^(s) = (-sin phi_k, cos phi_k, 0), e2 = kappa_hat_perp and e_z.
"""

import cmath
import math
from typing import Tuple

import numpy as np
from pydantic import BaseModel, ConfigDict

from ..errors import KinematicsError
from ..logging_config import get_logger
from .kinematics import FluxParam, PairOut, PhotonIn, require_closed_form_point

logger = get_logger(__name__)


# ============ Types ============

class StructureParams(BaseModel):
    """Building blocks a, b, D, A, B and the angular sums Sigma+ / Sigma-."""

    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    a: float
    b: float
    D: float
    A: float
    B: float
    B_printed: float
    sigma_plus: complex
    sigma_minus: complex
    k_perp: float
    kp_perp: float
    kappa_perp: float
    psi: float
    psip: float

    @property
    def rho(self) -> float:
        """Geometric convergence rate of the partial-wave sums."""
        return max(self.a, self.b)

    @property
    def sigma_plus_sq(self) -> float:
        """|Sigma+|^2 in its explicit quotient form."""
        return self.b ** 2 / (_denominator(self.a, self.psi) * _denominator(self.b, self.psip))

    @property
    def sigma_minus_sq(self) -> float:
        return self.a ** 2 / (_denominator(self.a, self.psi) * _denominator(self.b, self.psip))


class AmplitudeVector(BaseModel):
    """Components of the reduced amplitude along (e1, e2, e_z)."""

    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    d1: complex = 0j
    d2: complex = 0j
    dz: complex = 0j

    def as_array(self) -> np.ndarray:
        return np.array([self.d1, self.d2, self.dz], dtype=complex)

    def cartesian(self, phi_k: float) -> np.ndarray:
        """Components in the fixed (x, y, z) frame."""
        e1 = np.array([-math.sin(phi_k), math.cos(phi_k), 0.0])
        e2 = np.array([math.cos(phi_k), math.sin(phi_k), 0.0])
        ez = np.array([0.0, 0.0, 1.0])
        return self.d1 * e1 + self.d2 * e2 + self.dz * ez

    def norm(self) -> float:
        return float(np.linalg.norm(self.as_array()))

    def __sub__(self, other: "AmplitudeVector") -> "AmplitudeVector":
        return AmplitudeVector(d1=self.d1 - other.d1, d2=self.d2 - other.d2, dz=self.dz - other.dz)


# ============ Structure functions ============

def _denominator(x: float, angle: float) -> float:
    return 1.0 - 2.0 * x * math.cos(angle) + x * x


def radial_shape(k_perp: float, kp_perp: float, kappa_perp: float) -> Tuple[float, float, float]:
    """
    Return (a, b, D) for a momentum-excess configuration.

    R = sqrt(kappa^4 - 2 kappa^2 (k^2 + k'^2) + (k^2 - k'^2)^2),
    a = 2 k kappa / (kappa^2 + k^2 - k'^2 + R), b likewise with k <-> k',
    D = kappa^2 a b / (k k' (1 - a^2 b^2)).
    """
    if min(k_perp, kp_perp, kappa_perp) <= 0:
        raise KinematicsError("transverse momenta must be positive")
    if kappa_perp <= k_perp + kp_perp:
        raise KinematicsError(
            f"momentum excess violated: kappa_perp={kappa_perp:g} <= k_perp + kp_perp={k_perp + kp_perp:g}"
        )

    k2, kp2, kappa2 = k_perp ** 2, kp_perp ** 2, kappa_perp ** 2
    radicand = (kappa2 - (k_perp + kp_perp) ** 2) * (kappa2 - (k_perp - kp_perp) ** 2)
    if radicand <= 0:
        raise KinematicsError("negative radicand in the structure functions")
    root = math.sqrt(radicand)

    a = 2.0 * k_perp * kappa_perp / (kappa2 + k2 - kp2 + root)
    b = 2.0 * kp_perp * kappa_perp / (kappa2 + kp2 - k2 + root)
    if not (0.0 < a < 1.0 and 0.0 < b < 1.0):
        raise KinematicsError(f"inconsistent structure functions a={a:g}, b={b:g}")
    D = kappa2 * a * b / (k_perp * kp_perp * (1.0 - (a * b) ** 2))
    return a, b, D


def trig_shape(eta: float, zeta: float, c: float = 1.0) -> Tuple[float, float, float, float, float]:
    """
    Trigonometric parametrization k = c sin(eta) cos(zeta), k' = c cos(eta) sin(zeta).

    Returns (k, k', a, b, D) with a = sin(eta)/cos(zeta), b = sin(zeta)/cos(eta)
    and D = 1 / (cos(eta + zeta) cos(eta - zeta)).
    """
    if not (eta > 0 and zeta > 0 and eta + zeta < math.pi / 2):
        raise KinematicsError("trig parametrization needs eta, zeta > 0 and eta + zeta < pi/2")
    k = c * math.sin(eta) * math.cos(zeta)
    kp = c * math.cos(eta) * math.sin(zeta)
    a = math.sin(eta) / math.cos(zeta)
    b = math.sin(zeta) / math.cos(eta)
    D = 1.0 / (math.cos(eta + zeta) * math.cos(eta - zeta))
    return k, kp, a, b, D


def structure_params(
    k_perp: float,
    kp_perp: float,
    kappa_perp: float,
    phi_perp: float,
    phip_perp: float,
    phi_k: float,
) -> StructureParams:
    """Evaluate a, b, D, A, B and Sigma+- for one kinematic point."""
    a, b, D = radial_shape(k_perp, kp_perp, kappa_perp)
    psi = phi_perp - phi_k
    psip = phip_perp - phi_k

    sigma_plus = 1.0 / (1.0 - a * cmath.exp(1j * psi)) * (b * cmath.exp(-1j * psip)) / (1.0 - b * cmath.exp(-1j * psip))
    sigma_minus = (a * cmath.exp(-1j * psi)) / (1.0 - a * cmath.exp(-1j * psi)) / (1.0 - b * cmath.exp(1j * psip))

    A = k_perp * (a - 1.0 / a) + kp_perp * (b - 1.0 / b)
    B = k_perp * (a + 1.0 / a) - kp_perp * (b + 1.0 / b)
    B_printed = k_perp * (a - 1.0 / a) - kp_perp * (b - 1.0 / b)

    return StructureParams(
        a=a, b=b, D=D, A=A, B=B, B_printed=B_printed,
        sigma_plus=sigma_plus, sigma_minus=sigma_minus,
        k_perp=k_perp, kp_perp=kp_perp, kappa_perp=kappa_perp,
        psi=psi, psip=psip,
    )


def params_for(photon: PhotonIn, pair: PairOut) -> StructureParams:
    return structure_params(pair.k_perp, pair.kp_perp, photon.kappa_perp, pair.phi_perp, pair.phip_perp, photon.phi_k)


# ============ Amplitude ============

def sin_pi(x: float) -> float:
    """sin(pi x), exactly zero at integers."""
    n = round(x)
    if abs(x - n) < 1e-12:
        return 0.0
    return math.sin(math.pi * x)


def overall_phase(flux: FluxParam, pair: PairOut) -> complex:
    """The [f]-dependent phase exp(i [f] (phi'_perp - phi_perp))."""
    return cmath.exp(1j * flux.int_part * (pair.phip_perp - pair.phi_perp))


def sector_sums(sp: StructureParams, delta: float) -> Tuple[complex, complex]:
    """X+ = e^{i pi delta} (ab)^delta Sigma+ and X- = e^{-i pi delta} (ab)^-delta Sigma-."""
    ab = sp.a * sp.b
    x_plus = cmath.exp(1j * math.pi * delta) * ab ** delta * sp.sigma_plus
    x_minus = cmath.exp(-1j * math.pi * delta) * ab ** (-delta) * sp.sigma_minus
    return x_plus, x_minus


def closed_form_amplitude(flux: FluxParam, photon: PhotonIn, pair: PairOut) -> AmplitudeVector:
    """
    Reduced amplitude in closed form.

        d = P0 sin(pi delta) D / kappa^2 * [ i A (X+ + X-) e1 + B (X+ - X-) e2
                                             + 2 (k3 - k3') (X+ - X-) e_z ]

    with P0 = exp(i [f] (phi'_perp - phi_perp)).
    """
    require_closed_form_point(pair, photon)
    s = sin_pi(flux.delta)
    if s == 0.0:
        return AmplitudeVector()

    sp = params_for(photon, pair)
    x_plus, x_minus = sector_sums(sp, flux.delta)
    prefactor = overall_phase(flux, pair) * s * sp.D / photon.kappa_perp ** 2

    return AmplitudeVector(
        d1=prefactor * 1j * sp.A * (x_plus + x_minus),
        d2=prefactor * sp.B * (x_plus - x_minus),
        dz=prefactor * 2.0 * (pair.k3 - pair.kp3) * (x_plus - x_minus),
    )


def selection_rule(m_bar: int, mp_bar: int) -> bool:
    """True iff the particle and antiparticle partial waves circle the string in opposite senses."""
    return (mp_bar >= 0 and m_bar < 0) or (mp_bar < 0 and m_bar >= 0)
