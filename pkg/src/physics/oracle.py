"""
Partial-wave brute-force evaluation of the amplitude.

The amplitude is summed term by term over the shifted indices
m_bar = m + [f] and mp_bar = m' - [f] in [-m_max, m_max]. Each term carries
the Bessel orders of its two modes, the coefficient product conj(c_m) c_m',
the closed angular factor and the radial integrals

    I(x, y, Q) = int_0^inf rho J_x(k rho) J_y(k' rho) J_Q(kappa rho) drho

which tier A takes from the tabulated identities and tier B from quadrature.
"""

from __future__ import annotations

import math
from enum import Enum
from typing import Callable, Dict, List, Optional, Set, Tuple

import numpy as np
from pydantic import BaseModel, ConfigDict

from ..config import QuadratureConfig
from ..errors import KinematicsError, TruncationError
from ..logging_config import get_logger
from .amplitude import AmplitudeVector, StructureParams, overall_phase, params_for, radial_shape, sin_pi
from .kinematics import FluxParam, PairOut, PhotonIn, require_closed_form_point
from .specfun import triple_bessel_integral

logger = get_logger(__name__)

# Configuration
TAIL_TARGET = 1e-14
MAX_M_MAX = 400
ORDER_TOL = 1e-9
NORMALIZATION = 0.5j


class Tier(str, Enum):
    A = "tierA"
    B = "tierB"


class TermClass(str, Enum):
    T1 = "T1"   # m_bar < 0, mp_bar < 0
    T2 = "T2"   # m_bar < 0, mp_bar >= 0
    T3 = "T3"   # m_bar >= 0, mp_bar < 0
    T4 = "T4"   # m_bar >= 0, mp_bar >= 0


def classify(m_bar: int, mp_bar: int) -> TermClass:
    if m_bar < 0:
        return TermClass.T1 if mp_bar < 0 else TermClass.T2
    return TermClass.T3 if mp_bar < 0 else TermClass.T4


class PartialWaveTerm(BaseModel):
    """One (m_bar, mp_bar) term with its coefficients and contribution to (d1, d2, dz)."""

    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    m_bar: int
    mp_bar: int
    c_m: complex
    c_mp: complex
    term_class: TermClass
    order: float
    order_p: float
    contribution: Tuple[complex, complex, complex]

    @property
    def magnitude(self) -> float:
        return float(np.linalg.norm(np.array(self.contribution)))


class OracleResult(BaseModel):
    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    amplitude: AmplitudeVector
    tier: Tier
    m_max: int
    truncation_bound: float
    quadratures: int = 0
    gap_integrals: int = 0
    identity_gap: Optional[AmplitudeVector] = None
    terms: Optional[List[PartialWaveTerm]] = None


# ============ Radial integrals ============

class RadialTable:
    """Tabulated values of I(x, y, Q) for kappa > k + k' (vectorized)."""

    def __init__(self, k_perp: float, kp_perp: float, kappa_perp: float):
        self.a, self.b, self.D = radial_shape(k_perp, kp_perp, kappa_perp)
        self.scale = -2.0 * self.D / (math.pi * kappa_perp ** 2)

    @staticmethod
    def vanishing_mask(x: np.ndarray, y: np.ndarray, Q: np.ndarray) -> np.ndarray:
        s = x + y
        return (np.abs(s - Q) < ORDER_TOL) | (np.abs(s + Q) < ORDER_TOL)

    def __call__(self, x: np.ndarray, y: np.ndarray, Q: np.ndarray) -> np.ndarray:
        x, y, Q = np.broadcast_arrays(np.asarray(x, float), np.asarray(y, float), np.asarray(Q, float))
        vanishing = self.vanishing_mask(x, y, Q)
        second = ~vanishing & (np.abs(x - y - Q) < ORDER_TOL)
        first = ~vanishing & ~second & (np.abs(y - x - Q) < ORDER_TOL)
        if not np.all(vanishing | second | first):
            bad = np.argwhere(~(vanishing | second | first))[0]
            idx = tuple(bad)
            raise KinematicsError(f"no tabulated identity for orders ({x[idx]}, {y[idx]}, {Q[idx]})")

        power = self.scale * np.power(self.a, x) * np.power(self.b, y)
        values = np.zeros_like(x)
        values[second] = _sin_pi_array(y[second]) * power[second]
        values[first] = _sin_pi_array(x[first]) * power[first]
        return values


def _sin_pi_array(v: np.ndarray) -> np.ndarray:
    out = np.sin(np.pi * v)
    out[np.abs(v - np.round(v)) < 1e-12] = 0.0
    return out


class QuadratureRadial:
    """
    Radial integrals by quadrature, memoized on the order triple.

    Calling the instance returns the integrals the tabulated identities also
    cover. Vanishing-class integrals with an order at or below -1 (or with
    x + y < 0) sit outside the regime where the vanishing identity holds;
    they are still integrated, but handed out through ``gap`` so the oracle
    can report their contribution separately.
    """

    def __init__(self, k_perp: float, kp_perp: float, kappa_perp: float, cfg: QuadratureConfig):
        self.k_perp, self.kp_perp, self.kappa_perp = k_perp, kp_perp, kappa_perp
        self.cfg = cfg
        self.cache: Dict[Tuple[float, float, int], float] = {}
        self.gap_keys: Set[Tuple[float, float, int]] = set()

    @staticmethod
    def outside_regime(x: float, y: float, Q: float) -> bool:
        on_vanishing = abs(x + y - Q) < ORDER_TOL or abs(x + y + Q) < ORDER_TOL
        return on_vanishing and (min(x, y) <= -1.0 or x + y < -ORDER_TOL)

    def value(self, x: float, y: float, Q: float) -> float:
        key = (round(x, 10), round(y, 10), int(round(Q)))
        if key not in self.cache:
            self.cache[key] = triple_bessel_integral(
                x, y, float(key[2]), self.k_perp, self.kp_perp, self.kappa_perp, self.cfg,
            )
            if self.outside_regime(x, y, Q):
                self.gap_keys.add(key)
        return self.cache[key]

    def _evaluate(self, x, y, Q, want_gap: bool) -> np.ndarray:
        x, y, Q = np.broadcast_arrays(np.asarray(x, float), np.asarray(y, float), np.asarray(Q, float))
        out = np.zeros(x.shape)
        for idx in np.ndindex(x.shape):
            if self.outside_regime(x[idx], y[idx], Q[idx]) == want_gap:
                out[idx] = self.value(x[idx], y[idx], Q[idx])
        return out

    def __call__(self, x: np.ndarray, y: np.ndarray, Q: np.ndarray) -> np.ndarray:
        return self._evaluate(x, y, Q, want_gap=False)

    def gap(self, x: np.ndarray, y: np.ndarray, Q: np.ndarray) -> np.ndarray:
        return self._evaluate(x, y, Q, want_gap=True)


# ============ Term assembly ============

def angular_factor(Q: np.ndarray, phi_k: float) -> np.ndarray:
    """Angular integral without its Bessel factor: 2 pi exp(i pi Q / 2) exp(-i Q phi_k)."""
    return 2.0 * np.pi * np.exp(1j * Q * (np.pi / 2.0 - phi_k))


class ModeGrid:
    """Index bookkeeping for the (m_bar, mp_bar) grid of one point."""

    def __init__(self, flux: FluxParam, pair: PairOut, m_max: int, m_lo: Optional[int] = None, mp_lo: Optional[int] = None):
        m_range = np.arange(-m_max if m_lo is None else m_lo, m_max + 1)
        mp_range = np.arange(-m_max if mp_lo is None else mp_lo, m_max + 1)
        self.m_bar, self.mp_bar = np.meshgrid(m_range, mp_range, indexing="ij")
        delta = flux.delta

        self.sigma = np.where(self.m_bar >= 0, 1, -1)
        self.sigma_p = np.where(self.mp_bar >= 0, 1, -1)
        # signed orders; mp_bar = 0 sits on the non-negative branch with order -delta
        self.alpha = self.sigma * (self.m_bar + delta)
        self.beta = self.sigma_p * (self.mp_bar - delta)
        self.q = self.m_bar + self.mp_bar

        m = self.m_bar - flux.int_part
        mp = self.mp_bar + flux.int_part
        self.c_m = np.exp(1j * (m * (np.pi - pair.phi_perp) - np.pi * self.alpha / 2.0))
        self.c_mp = np.exp(-1j * (mp * (np.pi - pair.phip_perp) - np.pi * self.beta / 2.0))
        self.coefficient = np.conj(self.c_m) * self.c_mp


def term_components(
    grid: ModeGrid,
    radial: Callable[[np.ndarray, np.ndarray, np.ndarray], np.ndarray],
    photon: PhotonIn,
    pair: PairOut,
) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Per-term (d1, d2, dz) contributions, normalization included."""
    k, kp = pair.k_perp, pair.kp_perp
    s, sp_, alpha, beta, q = grid.sigma, grid.sigma_p, grid.alpha, grid.beta, grid.q
    C = grid.coefficient

    raised = C * angular_factor(q - 1, photon.phi_k) * (
        sp_ * kp * radial(alpha, beta - sp_, q - 1) - s * k * radial(alpha - s, beta, q - 1)
    )
    lowered = C * angular_factor(q + 1, photon.phi_k) * (
        -sp_ * kp * radial(alpha, beta + sp_, q + 1) + s * k * radial(alpha + s, beta, q + 1)
    )
    longitudinal = C * angular_factor(q, photon.phi_k) * 1j * (pair.k3 - pair.kp3) * radial(alpha, beta, q)

    d_x = 0.5 * (raised + lowered)
    d_y = (raised - lowered) / 2j
    cos_k, sin_k = math.cos(photon.phi_k), math.sin(photon.phi_k)
    d1 = NORMALIZATION * (-sin_k * d_x + cos_k * d_y)
    d2 = NORMALIZATION * (cos_k * d_x + sin_k * d_y)
    dz = NORMALIZATION * longitudinal
    return d1, d2, dz


# ============ Truncation ============

def truncation_bound(sp: StructureParams, flux: FluxParam, pair: PairOut, m_max: int) -> float:
    """Bound on |oracle(infinity) - oracle(m_max)| from the geometric decay of the terms."""
    rho = sp.rho
    s = abs(sin_pi(flux.delta))
    weight = (
        pair.k_perp * (sp.a + 1.0 / sp.a)
        + pair.kp_perp * (sp.b + 1.0 / sp.b)
        + 2.0 * abs(pair.k3 - pair.kp3)
    )
    prefactor = 8.0 * s * sp.D * weight * (sp.a * sp.b) ** (-flux.delta) / sp.kappa_perp ** 2
    return prefactor * rho ** (m_max + 1) / (1.0 - rho) ** 2


def default_m_max(sp: StructureParams) -> int:
    """Smallest m with rho^m < 1e-14 (1 - rho)."""
    rho = sp.rho
    m = int(math.ceil(math.log(TAIL_TARGET * (1.0 - rho)) / math.log(rho)))
    if m > MAX_M_MAX:
        raise TruncationError(f"geometric tail needs m_max={m} > {MAX_M_MAX} at rate {rho:.6f}")
    return max(m, 1)


# ============ Oracle ============

def oracle_amplitude(
    flux: FluxParam,
    photon: PhotonIn,
    pair: PairOut,
    m_max: Optional[int] = None,
    tier: Tier = Tier.A,
    cfg: Optional[QuadratureConfig] = None,
    keep_terms: bool = False,
) -> OracleResult:
    """
    Truncated partial-wave sum over m_bar, mp_bar in [-m_max, m_max].

    Tier A takes every radial integral from the tabulated identities; tier B
    integrates each distinct one numerically and reports the terms whose
    integrals the vanishing identity does not cover as ``identity_gap``.
    Terms are reduced with numpy's pairwise summation in fixed grid order.
    """
    require_closed_form_point(pair, photon)
    tier = Tier(tier)
    cfg = cfg or QuadratureConfig()
    sp = params_for(photon, pair)
    m_max = default_m_max(sp) if m_max is None else m_max
    if m_max < 1:
        raise TruncationError("m_max must be at least 1")

    grid = ModeGrid(flux, pair, m_max)
    if tier is Tier.A:
        radial = RadialTable(pair.k_perp, pair.kp_perp, photon.kappa_perp)
    else:
        radial = QuadratureRadial(pair.k_perp, pair.kp_perp, photon.kappa_perp, cfg)

    d1, d2, dz = term_components(grid, radial, photon, pair)
    amplitude = AmplitudeVector(d1=complex(d1.sum()), d2=complex(d2.sum()), dz=complex(dz.sum()))

    terms = None
    if keep_terms:
        terms = [
            PartialWaveTerm(
                m_bar=int(grid.m_bar[idx]), mp_bar=int(grid.mp_bar[idx]),
                c_m=complex(grid.c_m[idx]), c_mp=complex(grid.c_mp[idx]),
                term_class=classify(int(grid.m_bar[idx]), int(grid.mp_bar[idx])),
                order=float(grid.alpha[idx]), order_p=float(grid.beta[idx]),
                contribution=(complex(d1[idx]), complex(d2[idx]), complex(dz[idx])),
            )
            for idx in np.ndindex(grid.m_bar.shape)
        ]

    quadratures, gap_integrals, identity_gap = 0, 0, None
    if isinstance(radial, QuadratureRadial):
        g1, g2, gz = term_components(grid, radial.gap, photon, pair)
        identity_gap = AmplitudeVector(d1=complex(g1.sum()), d2=complex(g2.sum()), dz=complex(gz.sum()))
        quadratures, gap_integrals = len(radial.cache), len(radial.gap_keys)
        if gap_integrals:
            logger.info(
                "tier B identity gap |%.3e| from %d integrals outside the vanishing regime",
                identity_gap.norm(), gap_integrals,
            )
    logger.debug("oracle %s m_max=%d quadratures=%d gap_integrals=%d", tier.value, m_max, quadratures, gap_integrals)
    return OracleResult(
        amplitude=amplitude,
        tier=tier,
        m_max=m_max,
        truncation_bound=truncation_bound(sp, flux, pair, m_max),
        quadratures=quadratures,
        gap_integrals=gap_integrals,
        identity_gap=identity_gap,
        terms=terms,
    )


# ============ Lowered-particle sector ============

def lowered_sector_series(
    flux: FluxParam,
    photon: PhotonIn,
    pair: PairOut,
    n_max: Optional[int] = None,
    cfg: Optional[QuadratureConfig] = None,
) -> complex:
    """
    Partial sum of (sgn - 1) conj(c_m) c_m' Omega(q + 1) I(|m~| - 1, order', q + 1)
    over m_bar in [-n_max, -1], mp_bar in [0, n_max].

    Every other sign class of this piece vanishes, through the sign factor
    (m_bar >= 0) or the vanishing identity (both negative).

    Without ``n_max`` the sum is extended until lowered_sector_bound drops
    below ``cfg.series_tol`` times the partial sum.
    """
    if n_max is None:
        return _lowered_sector_to_tolerance(flux, photon, pair, cfg or QuadratureConfig())
    grid = ModeGrid(flux, pair, n_max, mp_lo=0)
    keep = grid.m_bar < 0
    radial = RadialTable(pair.k_perp, pair.kp_perp, photon.kappa_perp)
    alpha, beta, q = grid.alpha[keep], grid.beta[keep], grid.q[keep]
    terms = (
        (grid.sigma[keep] - 1)
        * grid.coefficient[keep]
        * angular_factor(q + 1, photon.phi_k)
        * radial(alpha - 1, beta, q + 1)
    )
    return complex(terms.sum())


def lowered_sector_closed(flux: FluxParam, photon: PhotonIn, pair: PairOut) -> complex:
    """Geometric resummation of lowered_sector_series."""
    sp = params_for(photon, pair)
    delta = flux.delta
    prefactor = 8j * sp.D * sin_pi(delta) / sp.kappa_perp ** 2
    phase = overall_phase(flux, pair) * np.exp(-1j * (math.pi * delta + photon.phi_k))
    geometric = np.exp(-1j * sp.psi) / ((1.0 - sp.a * np.exp(-1j * sp.psi)) * (1.0 - sp.b * np.exp(1j * sp.psip)))
    return complex(prefactor * phase * (sp.a * sp.b) ** (-delta) * geometric)


def lowered_sector_bound(flux: FluxParam, photon: PhotonIn, pair: PairOut, n_max: int) -> float:
    """Bound on the remainder of lowered_sector_series beyond n_max."""
    sp = params_for(photon, pair)
    scale = 8.0 * sp.D * abs(sin_pi(flux.delta)) * (sp.a * sp.b) ** (-flux.delta) / sp.kappa_perp ** 2
    return scale * (sp.a ** n_max + sp.b ** (n_max + 1)) / ((1.0 - sp.a) * (1.0 - sp.b))


def lowered_sector_order(flux: FluxParam, photon: PhotonIn, pair: PairOut, cfg: QuadratureConfig) -> int:
    """Smallest n_max whose remainder bound is within cfg.series_tol of the partial sum."""
    n = 1
    while n <= MAX_M_MAX:
        partial = abs(lowered_sector_series(flux, photon, pair, n))
        if lowered_sector_bound(flux, photon, pair, n) <= cfg.series_tol * partial:
            return n
        n += 1
    raise TruncationError(f"lowered sector not within series_tol={cfg.series_tol:g} by n_max={MAX_M_MAX}")


def _lowered_sector_to_tolerance(flux: FluxParam, photon: PhotonIn, pair: PairOut, cfg: QuadratureConfig) -> complex:
    n = lowered_sector_order(flux, photon, pair, cfg)
    logger.debug("lowered sector stops at n_max=%d (series_tol=%g)", n, cfg.series_tol)
    return lowered_sector_series(flux, photon, pair, n)
