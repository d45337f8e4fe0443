"""
Polarization densities, the differential cross section and its limiting forms.

All densities are reduced (box size stripped): Lambda = |d . e^(lambda)|^2 / (eps eps_bar)
for the reduced amplitude d, and

    dsigma_lambda / (dk_perp dphi_perp dk'_perp dphi'_perp dk'_3)
        = (alpha / kappa) (2 pi)^-3 k_perp k'_perp Lambda_lambda.
"""

import cmath
import math
import warnings
from typing import Tuple

import numpy as np
from pydantic import BaseModel, ConfigDict, Field

from ..errors import RegimeError, RegimeWarning
from ..logging_config import get_logger
from .amplitude import AmplitudeVector, StructureParams, overall_phase, params_for, sin_pi
from .kinematics import FluxParam, PairOut, PhotonIn, Polarization, require_closed_form_point

logger = get_logger(__name__)

# Configuration
NR_WINDOW = 0.05           # kappa within 2M (1 + NR_WINDOW)
UR_THRESHOLD = 100.0       # kappa above UR_THRESHOLD * 2M
REGIME_HARD_LIMIT = 10.0   # beyond this factor a limit form is refused
COLLINEAR_TOL = 0.05
ROUNDING_FLOOR = 1e-13


# ============ Types ============

class PolarizationDensity(BaseModel):
    model_config = ConfigDict(frozen=True)

    lambda_s: float = Field(ge=0.0)
    lambda_p: float = Field(ge=0.0)

    def select(self, polarization: Polarization) -> float:
        return self.lambda_s if Polarization(polarization) is Polarization.S else self.lambda_p


class XsecPoint(BaseModel):
    model_config = ConfigDict(frozen=True)

    value: float = Field(ge=0.0)
    polarization: Polarization
    kinematics: PairOut
    photon: PhotonIn


class NRLimit(BaseModel):
    """Near-threshold densities, amplitude and cross sections."""

    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    density: PolarizationDensity
    amplitude: AmplitudeVector
    xsec_s: float
    xsec_p: float
    brace_s: float
    brace_p: float
    regime_factor: float


class URLimit(BaseModel):
    """Forward (collinear) high-energy densities and cross sections."""

    model_config = ConfigDict(frozen=True)

    sigma_plus: float
    sigma_minus: float
    a_over_b: float
    density: PolarizationDensity
    xsec_s: float
    xsec_p: float
    regime_factor: float


# ============ Densities ============

def polarization_vectors(photon: PhotonIn) -> Tuple[np.ndarray, np.ndarray]:
    """Linear polarization vectors e^(s) and e^(p) of the incident photon."""
    theta, phi = photon.theta_k, photon.phi_k
    e_s = np.array([-math.sin(phi), math.cos(phi), 0.0])
    e_p = np.array([-math.cos(theta) * math.cos(phi), -math.cos(theta) * math.sin(phi), math.sin(theta)])
    return e_s, e_p


def _completed_square(first: float, second: float, cross: float) -> float:
    # first + second + cross is a squared modulus; clip rounding below zero
    value = first + second + cross
    if value < 0.0 and value > -ROUNDING_FLOOR * (first + second):
        return 0.0
    return value


def density_braces(sp: StructureParams, delta: float) -> Tuple[float, float]:
    """Brace factors {(ab)^2d |S+|^2 + (ab)^-2d |S-|^2 +- 2 Re(e^{2 i pi d} S+ S-*)} for s and p."""
    ab = sp.a * sp.b
    first = ab ** (2.0 * delta) * sp.sigma_plus_sq
    second = ab ** (-2.0 * delta) * sp.sigma_minus_sq
    cross = 2.0 * (cmath.exp(2j * math.pi * delta) * sp.sigma_plus * sp.sigma_minus.conjugate()).real
    return _completed_square(first, second, cross), _completed_square(first, second, -cross)


def polarization_density(sp: StructureParams, pair: PairOut, flux: FluxParam) -> PolarizationDensity:
    """Lambda^(s) and Lambda^(p) in closed form."""
    s = sin_pi(flux.delta)
    if s == 0.0:
        return PolarizationDensity(lambda_s=0.0, lambda_p=0.0)

    brace_s, brace_p = density_braces(sp, flux.delta)
    prefactor = (sp.D * s) ** 2 / (pair.eps * pair.eps_bar * sp.kappa_perp ** 4)
    return PolarizationDensity(
        lambda_s=prefactor * sp.A ** 2 * brace_s,
        lambda_p=prefactor * 4.0 * (pair.k3 - pair.kp3) ** 2 * brace_p,
    )


def projected_density(amplitude: AmplitudeVector, photon: PhotonIn, pair: PairOut) -> PolarizationDensity:
    """|d . e^(lambda)|^2 / (eps eps_bar) computed straight from an amplitude vector."""
    d = amplitude.cartesian(photon.phi_k)
    e_s, e_p = polarization_vectors(photon)
    norm = pair.eps * pair.eps_bar
    return PolarizationDensity(
        lambda_s=abs(np.dot(d, e_s)) ** 2 / norm,
        lambda_p=abs(np.dot(d, e_p)) ** 2 / norm,
    )


def xsec_prefactor(alpha: float, kappa: float, k_perp: float, kp_perp: float) -> float:
    return alpha / kappa * (2.0 * math.pi) ** -3 * k_perp * kp_perp


def differential_xsec(flux: FluxParam, photon: PhotonIn, pair: PairOut, alpha: float) -> XsecPoint:
    """Fully differential cross section for the photon's polarization."""
    require_closed_form_point(pair, photon)
    density = polarization_density(params_for(photon, pair), pair, flux)
    value = xsec_prefactor(alpha, photon.kappa, pair.k_perp, pair.kp_perp) * density.select(photon.polarization)
    return XsecPoint(value=value, polarization=photon.polarization, kinematics=pair, photon=photon)


# ============ Limits ============

def limit_regime_factor(regime: str, kappa: float, mass: float) -> float:
    """How far a point lies outside a limit's regime; <= 1 means inside."""
    if regime == "nr":
        return kappa / (2.0 * mass * (1.0 + NR_WINDOW))
    if regime == "ur":
        return UR_THRESHOLD * 2.0 * mass / kappa
    raise ValueError(f"unknown regime {regime!r}")


def _guard(regime: str, kappa: float, mass: float) -> float:
    factor = limit_regime_factor(regime, kappa, mass)
    if factor > REGIME_HARD_LIMIT:
        raise RegimeError(f"{regime} limit requested {factor:.1f}x outside its regime (kappa={kappa:g}, M={mass:g})")
    if factor > 1.0:
        message = f"{regime} limit used {factor:.2f}x outside its regime (kappa={kappa:g}, M={mass:g})"
        logger.warning(message)
        warnings.warn(message, RegimeWarning, stacklevel=3)
    return factor


def nr_limit(flux: FluxParam, photon: PhotonIn, pair: PairOut, alpha: float = 1.0 / 137.035999) -> NRLimit:
    """
    Leading behaviour just above threshold: a ~ k/2M, b ~ k'/2M, D ~ 1,
    A ~ -2 kappa, B ~ 0, eps eps_bar ~ M^2.
    """
    require_closed_form_point(pair, photon)
    M = pair.mass
    factor = _guard("nr", photon.kappa, M)

    k, kp = pair.k_perp, pair.kp_perp
    s = sin_pi(flux.delta)
    x = k * kp / (4.0 * M ** 2)
    psi = pair.phi_perp - photon.phi_k
    psip = pair.phip_perp - photon.phi_k
    plus = x ** flux.delta * kp * cmath.exp(1j * (math.pi * flux.delta - psip))
    minus = x ** (-flux.delta) * k * cmath.exp(-1j * (math.pi * flux.delta + psi))
    phase = overall_phase(flux, pair)

    amplitude = AmplitudeVector(
        d1=-1j * phase * s / (2.0 * M ** 2) * (plus + minus),
        d2=0j,
        dz=phase * s * pair.k3 / (2.0 * M ** 3) * (plus - minus),
    )

    square = x ** (2.0 * flux.delta) * kp ** 2 + x ** (-2.0 * flux.delta) * k ** 2
    cross = 2.0 * k * kp * math.cos(2.0 * math.pi * flux.delta + psi - psip)
    brace_s = _completed_square(square, 0.0, cross)
    brace_p = _completed_square(square, 0.0, -cross)
    density = PolarizationDensity(
        lambda_s=s ** 2 / (4.0 * M ** 6) * brace_s,
        lambda_p=s ** 2 * pair.k3 ** 2 / (4.0 * M ** 8) * brace_p,
    )
    prefactor = xsec_prefactor(alpha, photon.kappa, k, kp)
    return NRLimit(
        density=density, amplitude=amplitude,
        xsec_s=prefactor * density.lambda_s, xsec_p=prefactor * density.lambda_p,
        brace_s=brace_s, brace_p=brace_p, regime_factor=factor,
    )


def ur_limit(sp: StructureParams, flux: FluxParam, pair: PairOut, alpha: float = 1.0 / 137.035999) -> URLimit:
    """
    Forward emission at kappa >> 2M with phi_k ~ phi_perp ~ phi'_perp, where
    Sigma+ -> b / ((1 - a)(1 - b)), Sigma- -> (a / b) Sigma+ and eps ~ |k|.
    """
    kappa = sp.kappa_perp
    factor = _guard("ur", kappa, pair.mass)
    spread = max(abs(math.remainder(sp.psi, 2.0 * math.pi)), abs(math.remainder(sp.psip, 2.0 * math.pi)))
    if spread > COLLINEAR_TOL:
        message = f"ur limit assumes collinear emission; angular spread {spread:.3f} rad"
        logger.warning(message)
        warnings.warn(message, RegimeWarning, stacklevel=2)

    a, b, delta = sp.a, sp.b, flux.delta
    s = sin_pi(delta)
    sigma_plus = b / ((1.0 - a) * (1.0 - b))
    ratio = a / b
    ab = a * b
    square = ab ** (2.0 * delta) + ratio ** 2 * ab ** (-2.0 * delta)
    cross = 2.0 * ratio * math.cos(2.0 * math.pi * delta)

    k_total = math.hypot(pair.k_perp, pair.k3)
    kp_total = math.hypot(pair.kp_perp, pair.kp3)
    prefactor = (sp.D * s * sigma_plus) ** 2 / (k_total * kp_total * kappa ** 4)
    density = PolarizationDensity(
        lambda_s=prefactor * sp.A ** 2 * _completed_square(square, 0.0, cross),
        lambda_p=prefactor * 4.0 * (pair.k3 - pair.kp3) ** 2 * _completed_square(square, 0.0, -cross),
    )
    xsec = xsec_prefactor(alpha, kappa, pair.k_perp, pair.kp_perp)
    return URLimit(
        sigma_plus=sigma_plus, sigma_minus=ratio * sigma_plus, a_over_b=ratio,
        density=density, xsec_s=xsec * density.lambda_s, xsec_p=xsec * density.lambda_p,
        regime_factor=factor,
    )
