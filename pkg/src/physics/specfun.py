"""
Real-order Bessel functions and the quadrature kernels built on them.

Evaluation is delegated to scipy.special (AMOS / Cephes); this module owns
the order bookkeeping (integer detection, reflection, connection formula),
the angular integral, and the semi-infinite triple-product integral.
"""

from __future__ import annotations

import math
from typing import Callable, Optional, Tuple, Union

import numpy as np
from scipy import integrate, special

from ..config import QuadratureConfig
from ..errors import BesselDomainError, KinematicsError, QuadratureError
from ..logging_config import get_logger

logger = get_logger(__name__)

ArrayLike = Union[float, np.ndarray]

# Configuration
MAX_ORDER = 200.0
INTEGER_TOL = 1e-12
HEAD_MARGIN = 20.0        # the tail starts where min(b1, b2, c) x exceeds the largest order by this much
TAIL_DECAY_UNITS = 50.0   # e^{-50} truncation of the rotated tail
WINDOW_EDGE = 6.0         # damping window edge in units of sigma; erfc(6) ~ 2e-17


# =============================================================================
# Bessel functions
# =============================================================================

def nearest_integer(nu: float) -> Tuple[bool, int]:
    """Return (is_integer, round(nu)) with the package-wide integer tolerance."""
    n = int(round(nu))
    return abs(nu - n) < INTEGER_TOL, n


def _check_order(nu: float) -> None:
    if not math.isfinite(nu) or abs(nu) > MAX_ORDER:
        raise BesselDomainError(f"Bessel order {nu!r} outside supported range |nu| <= {MAX_ORDER:g}")


def bessel_j(nu: float, x: ArrayLike) -> ArrayLike:
    """
    Bessel function of the first kind J_nu(x) for real order and x >= 0.

    Integer orders use J_{-n} = (-1)^n J_n exactly; negative non-integer
    orders use J_{-mu} = J_mu cos(mu pi) - Y_mu sin(mu pi).

    Raises
    ------
    BesselDomainError
        Order outside |nu| <= 200 or a negative argument.
    """
    _check_order(nu)
    xs = np.asarray(x, dtype=float)
    if np.any(xs < 0) or np.any(~np.isfinite(xs)):
        raise BesselDomainError("Bessel argument must be finite and non-negative")

    is_int, n = nearest_integer(nu)
    if is_int:
        value = special.jv(abs(n), xs)
        if n < 0 and n % 2:
            value = -value
    elif nu >= 0:
        value = special.jv(nu, xs)
    else:
        mu = -nu
        with np.errstate(invalid="ignore", over="ignore"):
            value = special.jv(mu, xs) * math.cos(mu * math.pi) - special.yv(mu, xs) * math.sin(mu * math.pi)

    return float(value) if np.ndim(value) == 0 else value


def bessel_jp(nu: float, x: ArrayLike) -> ArrayLike:
    """Derivative J'_nu(x) from the recurrence (J_{nu-1} - J_{nu+1}) / 2."""
    value = 0.5 * (np.asarray(bessel_j(nu - 1.0, x)) - np.asarray(bessel_j(nu + 1.0, x)))
    return float(value) if np.ndim(value) == 0 else value


def bessel_j_leading(nu: float, x: ArrayLike) -> ArrayLike:
    """
    Small-argument leading term of J_nu(x).

    (x/2)^nu / Gamma(nu + 1) for non-integer orders, which diverges at the
    origin when nu < 0; (-1)^n (x/2)^|n| / |n|! for integer nu = n.
    """
    _check_order(nu)
    xs = np.asarray(x, dtype=float)
    is_int, n = nearest_integer(nu)
    if is_int:
        value = np.power(xs / 2.0, abs(n)) / math.factorial(abs(n))
        if n < 0 and n % 2:
            value = -value
    else:
        with np.errstate(divide="ignore"):
            value = np.power(xs / 2.0, nu) / special.gamma(nu + 1.0)
    return float(value) if np.ndim(value) == 0 else value


def leading_power(nu: float) -> float:
    """Exponent of the small-argument power law of J_nu."""
    is_int, n = nearest_integer(nu)
    return float(abs(n)) if is_int else nu


# =============================================================================
# Angular integral
# =============================================================================

def phi_integral(q: float, z: float, cfg: QuadratureConfig) -> complex:
    """
    Direct quadrature of  int_{-pi}^{pi} exp(i q chi + i z cos chi) dchi.

    Raises
    ------
    QuadratureError
        If either real quadrature reports non-convergence.
    """
    if not math.isfinite(z):
        raise BesselDomainError("z must be finite")

    def part(fn: Callable[[float], float], label: str) -> float:
        value, err = _quad(fn, -math.pi, math.pi, cfg)
        logger.debug("phi_integral %s q=%g z=%g value=%.6e err=%.1e", label, q, z, value, err)
        return value

    real = part(lambda chi: math.cos(q * chi + z * math.cos(chi)), "re")
    imag = part(lambda chi: math.sin(q * chi + z * math.cos(chi)), "im")
    return complex(real, imag)


def phi_integral_closed(q: int, z: float) -> complex:
    """Closed form 2 pi exp(-i pi q / 2) J_{-q}(z) of the angular integral (integer q)."""
    return 2.0 * math.pi * complex(math.cos(-math.pi * q / 2), math.sin(-math.pi * q / 2)) * bessel_j(-float(q), z)


def _quad(
    fn: Callable[[float], float],
    lo: float,
    hi: float,
    cfg: QuadratureConfig,
    epsabs: Optional[float] = None,
) -> Tuple[float, float]:
    epsabs = cfg.abs_tol if epsabs is None else epsabs
    value, err, _info, *message = integrate.quad(
        fn, lo, hi, epsabs=epsabs, epsrel=cfg.rel_tol, limit=cfg.max_subdivisions, full_output=1,
    )
    if message:
        # roundoff-limited results are accepted when the estimate is still small
        if err > 10.0 * max(epsabs, cfg.rel_tol * abs(value)):
            raise QuadratureError(f"quad did not converge on [{lo:g}, {hi:g}]: {message[0].strip()}")
        logger.debug("quad warning on [%g, %g] accepted (err=%.1e)", lo, hi, err)
    return value, err


# =============================================================================
# Triple-product integral
# =============================================================================

def triple_bessel_integral(
    mu: float,
    nu: float,
    lam: float,
    b1: float,
    b2: float,
    c: float,
    cfg: QuadratureConfig,
) -> float:
    """
    Numerical value of  int_0^inf x J_mu(b1 x) J_nu(b2 x) J_lam(c x) dx  for c > b1 + b2.

    The integral is split at X0, beyond which every Bessel factor is past its
    turning point. The head [0, X0] is integrated adaptively in panels of two
    periods of the fastest beat frequency. The oscillatory tail is handled by
    ``cfg.tail_method``:

    rotated
        Each J is split into its two Hankel components. The product then
        separates into four beat frequencies c +- b1 +- b2, all positive, and
        each piece is integrated along x = X0 + i y where it decays like
        exp(-omega y). Exact up to quadrature error.
    damped
        The tail is multiplied by a smooth erfc window of width 1/eps for eps
        in ``cfg.damping_sequence`` (in units of the slowest beat
        c - b1 - b2), and eps is taken towards 0 until successive tails agree.

    Raises
    ------
    KinematicsError
        Outside the regime c > b1 + b2 or with non-positive arguments.
    QuadratureError
        Non-integrable origin behaviour, quadrature failure or an
        extrapolation residual above ``cfg.extrapolation_tol``.
    """
    for order in (mu, nu, lam):
        _check_order(order)
    if min(b1, b2, c) <= 0:
        raise KinematicsError("b1, b2 and c must be positive")
    if c <= b1 + b2:
        raise KinematicsError(f"triple integral requires c > b1 + b2 (got c={c:g}, b1+b2={b1 + b2:g})")

    origin_power = 1.0 + leading_power(mu) + leading_power(nu) + leading_power(lam)
    if origin_power <= -1.0:
        raise QuadratureError(f"integrand ~ x^{origin_power:g} is not integrable at the origin")

    x0 = (max(abs(mu), abs(nu), abs(lam)) + HEAD_MARGIN) / min(b1, b2, c)
    head = _head_integral(mu, nu, lam, b1, b2, c, x0, cfg)

    if cfg.tail_method == "damped":
        tail = _damped_tail(mu, nu, lam, b1, b2, c, x0, cfg)
    else:
        tail = _rotated_tail(mu, nu, lam, b1, b2, c, x0, cfg)

    logger.debug(
        "triple(%g, %g, %g; %g, %g, %g) head=%.12e tail=%.12e x0=%.2f",
        mu, nu, lam, b1, b2, c, head, tail, x0,
    )
    return head + tail


def _product(mu: float, nu: float, lam: float, b1: float, b2: float, c: float) -> Callable[[float], float]:
    def integrand(x: float) -> float:
        return x * bessel_j(mu, b1 * x) * bessel_j(nu, b2 * x) * bessel_j(lam, c * x)
    return integrand


def _panels(lo: float, hi: float, width: float) -> np.ndarray:
    count = max(1, int(math.ceil((hi - lo) / width)))
    return np.linspace(lo, hi, count + 1)


def _head_integral(mu, nu, lam, b1, b2, c, x0, cfg: QuadratureConfig) -> float:
    integrand = _product(mu, nu, lam, b1, b2, c)
    edges = _panels(0.0, x0, 4.0 * math.pi / (b1 + b2 + c))
    epsabs = cfg.abs_tol / len(edges)
    return math.fsum(
        _quad(integrand, lo, hi, cfg, epsabs=epsabs)[0] for lo, hi in zip(edges[:-1], edges[1:])
    )


def _rotated_tail(mu, nu, lam, b1, b2, c, x0, cfg: QuadratureConfig) -> float:
    """(1/4) Re sum over Hankel sign pairs of the contour-rotated tail pieces."""
    signs = [(s1, s2) for s1 in (1, -1) for s2 in (1, -1)]
    omegas = np.array([c + s1 * b1 + s2 * b2 for s1, s2 in signs])

    def envelope(order: float, z: np.ndarray, sign: int) -> np.ndarray:
        return special.hankel1e(order, z) if sign > 0 else special.hankel2e(order, z)

    def pieces(t: float) -> np.ndarray:
        x = x0 + 1j * t / omegas
        out = np.empty(2 * len(signs))
        for idx, (s1, s2) in enumerate(signs):
            xi = x[idx]
            g = xi * envelope(mu, b1 * xi, s1) * envelope(nu, b2 * xi, s2) * special.hankel1e(lam, c * xi)
            value = g * math.exp(-t)
            out[2 * idx] = value.real
            out[2 * idx + 1] = value.imag
        return out

    res, err = integrate.quad_vec(
        pieces, 0.0, TAIL_DECAY_UNITS,
        epsabs=cfg.abs_tol, epsrel=cfg.rel_tol, limit=cfg.max_subdivisions, norm="max",
    )
    if not np.all(np.isfinite(res)):
        raise QuadratureError("rotated tail produced non-finite values")

    total = 0.0
    for idx, omega in enumerate(omegas):
        integral = complex(res[2 * idx], res[2 * idx + 1])
        phase = 1j * complex(math.cos(omega * x0), math.sin(omega * x0)) / omega
        total += (phase * integral).real
    logger.debug("rotated tail omegas=%s err=%.1e", omegas, err)
    return 0.25 * total


def _damped_tail(mu, nu, lam, b1, b2, c, x0, cfg: QuadratureConfig) -> float:
    """
    Tail under the smooth window (1/2) erfc((x - xc) / sigma), sigma = 1 / eps.

    The window is flat to double precision at x0, so the only error left is
    the Fourier content of its edge, exp(-(omega sigma)^2 / 4) at the slowest
    beat omega. The eps values run through ``cfg.damping_sequence`` until two
    consecutive tails agree within ``cfg.extrapolation_tol``.
    """
    integrand = _product(mu, nu, lam, b1, b2, c)
    omega_min = c - b1 - b2
    width = 4.0 * math.pi / (b1 + b2 + c)
    values = []
    estimate, residual = 0.0, math.inf
    for eps in np.array(cfg.damping_sequence) * omega_min:
        values.append(_windowed_tail(integrand, x0, 1.0 / eps, width, cfg))
        if len(values) < 2:
            continue
        estimate, residual = extrapolate_to_zero(np.array(values))
        if residual <= cfg.extrapolation_tol * max(abs(estimate), 1.0):
            break
    logger.debug("damped tail values=%s estimate=%.10e residual=%.2e", values, estimate, residual)
    if residual > cfg.extrapolation_tol * max(abs(estimate), 1.0):
        raise QuadratureError(f"damped-tail extrapolation residual {residual:.2e} above tolerance")
    return estimate


def _windowed_tail(integrand: Callable[[float], float], x0: float, sigma: float, width: float, cfg: QuadratureConfig) -> float:
    centre = x0 + WINDOW_EDGE * sigma
    edges = _panels(x0, centre + WINDOW_EDGE * sigma, width)
    epsabs = cfg.abs_tol / len(edges)

    def windowed(x: float) -> float:
        return integrand(x) * 0.5 * special.erfc((x - centre) / sigma)

    return math.fsum(_quad(windowed, lo, hi, cfg, epsabs=epsabs)[0] for lo, hi in zip(edges[:-1], edges[1:]))


def extrapolate_to_zero(values: np.ndarray) -> Tuple[float, float]:
    """
    Limit of a sequence of windowed tails ordered by decreasing eps.

    The windowed error falls off like a Gaussian in 1 / eps, so the last value
    is the estimate; the residual is its distance to the one before, which
    bounds the error of the earlier value and overstates that of the last.
    """
    if len(values) < 2:
        raise QuadratureError("need at least two damped values to judge convergence")
    return float(values[-1]), float(abs(values[-1] - values[-2]))
