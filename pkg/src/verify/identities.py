"""
Identity suite.

Each check pins one analytic ingredient of the closed-form amplitude:

    vanishing_integral        triple Bessel integral with lam = mu + nu is zero
    closed_integral           triple Bessel integral with lam = mu - nu in closed form
    phi_integral              angular integral against 2 pi exp(-i pi q/2) J_{-q}(z)
    geometric_resummation     lowered-sector partial sums against their resummed form
    structure_consistency     algebraic (a, b, D) against the trigonometric forms

All random grids are drawn from numpy's default_rng(seed), so a rerun with the
same seed reproduces every residual.
"""

import cmath
import math
from concurrent.futures import ThreadPoolExecutor
from typing import Callable, List, Optional, Sequence, Tuple

import numpy as np
from pydantic import BaseModel, ConfigDict

from ..config import DEFAULT_SEED, QuadratureConfig
from ..errors import KinematicsError, NumericalError
from ..logging_config import get_logger
from ..physics.amplitude import params_for, radial_shape, trig_shape
from ..physics.kinematics import FluxParam, PairOut, PhotonIn, decompose_flux, pair_from_transverse, solve_pair
from ..physics.oracle import lowered_sector_bound, lowered_sector_closed, lowered_sector_series
from ..physics.specfun import phi_integral, phi_integral_closed, triple_bessel_integral
from .report import IdentityReport

logger = get_logger(__name__)

# Tolerances
VANISHING_TOL = 1e-8
CLOSED_TOL = 1e-6
PHI_TOL = 1e-10
RESUMMATION_TOL = 1e-12
STRUCTURE_TOL = 1e-12
RATE_TOL = 0.02
NOISE_FLOOR = 1e-14

RESUMMATION_SCHEDULE = (5, 10, 20, 40)
BOUNDARY_FACTOR = 1.001


class VanishingPoint(BaseModel):
    model_config = ConfigDict(frozen=True)

    mu: float
    nu: float
    b1: float
    b2: float
    c: float

    @property
    def lam(self) -> float:
        return self.mu + self.nu


class ClosedPoint(BaseModel):
    model_config = ConfigDict(frozen=True)

    eta: float
    zeta: float
    mu: float
    nu: float
    c: float = 1.0


class ResummationPoint(BaseModel):
    model_config = ConfigDict(frozen=True)

    flux: FluxParam
    photon: PhotonIn
    pair: PairOut


def _relative(diff: float, reference: float) -> float:
    return diff / abs(reference) if reference != 0 else diff


# ============ Grids ============

def default_vanishing_grid(seed: int = DEFAULT_SEED, count: int = 18) -> List[VanishingPoint]:
    """The reference point, its near-boundary twin and `count` random points."""
    rng = np.random.default_rng(seed)
    grid = [
        VanishingPoint(mu=1, nu=2, b1=0.3, b2=0.4, c=1.0),
        VanishingPoint(mu=1, nu=2, b1=0.3, b2=0.4, c=BOUNDARY_FACTOR * 0.7),
    ]
    for _ in range(count):
        b1, b2 = rng.uniform(0.2, 1.0, size=2)
        mu, nu = rng.uniform(0.0, 3.0, size=2)
        if rng.random() < 0.5:
            mu, nu = float(round(mu)), float(round(nu))
        grid.append(VanishingPoint(mu=mu, nu=nu, b1=b1, b2=b2, c=(b1 + b2) * rng.uniform(1.2, 3.0)))
    return grid


def default_closed_grid(seed: int = DEFAULT_SEED, count: int = 20) -> List[ClosedPoint]:
    rng = np.random.default_rng(seed)
    grid = [
        ClosedPoint(eta=math.pi / 6, zeta=math.pi / 6, mu=0.7, nu=0.3),
        ClosedPoint(eta=math.pi / 6, zeta=math.pi / 5, mu=1.5, nu=1.0),
    ]
    for _ in range(count):
        eta, zeta = rng.uniform(0.1, 0.6, size=2)
        mu = rng.uniform(0.2, 2.0)
        nu = rng.uniform(0.1, mu)
        grid.append(ClosedPoint(eta=eta, zeta=zeta, mu=mu, nu=nu))
    return grid


def generic_point(delta: float = 0.3) -> ResummationPoint:
    """kappa = 3, k_perp = 0.8, k3 = 0.2, M = 1 at well separated azimuths."""
    photon = PhotonIn(kappa=3.0, phi_k=1.0)
    pair = solve_pair(3.0, 0.8, 0.2, 1.0, phi_perp=0.4, phip_perp=2.1)
    return ResummationPoint(flux=decompose_flux(delta), photon=photon, pair=pair)


def stress_point(delta: float = 0.3, eta: float = 0.7, zeta: float = 0.85, kappa: float = 3.0) -> ResummationPoint:
    """kappa_perp barely above k_perp + kp_perp, so a and b sit just below 1."""
    k, kp, _, _, _ = trig_shape(eta, zeta, kappa)
    photon = PhotonIn(kappa=kappa, phi_k=1.0)
    pair = pair_from_transverse(k, kp, kappa, phi_perp=0.4, phip_perp=2.1)
    return ResummationPoint(flux=decompose_flux(delta), photon=photon, pair=pair)


# ============ Checks ============

def check_vanishing_integral(
    grid: Optional[Sequence[VanishingPoint]] = None,
    cfg: Optional[QuadratureConfig] = None,
    tolerance: float = VANISHING_TOL,
    seed: int = DEFAULT_SEED,
) -> IdentityReport:
    """|int x J_mu(b1 x) J_nu(b2 x) J_{mu+nu}(c x) dx| for c > b1 + b2."""
    grid = default_vanishing_grid(seed) if grid is None else list(grid)
    for point in grid:
        if point.c <= point.b1 + point.b2:
            raise KinematicsError(f"vanishing identity needs c > b1 + b2, got {point}")

    cfg = cfg or QuadratureConfig()
    # points near the boundary carry a 1/(c - b1 - b2) amplification in the tail
    tight = cfg.model_copy(update={"abs_tol": min(cfg.abs_tol, 1e-13)})

    residuals, failures = [], []
    for idx, point in enumerate(grid):
        near_boundary = point.c < 1.01 * (point.b1 + point.b2)
        try:
            value = triple_bessel_integral(
                point.mu, point.nu, point.lam, point.b1, point.b2, point.c, tight if near_boundary else cfg,
            )
        except NumericalError as exc:
            failures.append(f"sample {idx}: {exc}")
            continue
        residuals.append(abs(value))

    return IdentityReport.from_residuals(
        "vanishing_integral", residuals, residuals, tolerance,
        samples=len(grid), failures=failures,
    )


def closed_integral_value(point: ClosedPoint) -> Tuple[float, float, float, float, float]:
    """(k, k', closed form, a, b) at a trigonometric grid point."""
    k, kp, a, b, D = trig_shape(point.eta, point.zeta, point.c)
    sine = 0.0 if abs(point.nu - round(point.nu)) < 1e-12 else math.sin(math.pi * point.nu)
    closed = -2.0 / (math.pi * point.c ** 2) * sine * a ** point.mu * b ** point.nu * D
    return k, kp, closed, a, b


def check_closed_integral(
    grid: Optional[Sequence[ClosedPoint]] = None,
    cfg: Optional[QuadratureConfig] = None,
    tolerance: float = CLOSED_TOL,
    seed: int = DEFAULT_SEED,
) -> IdentityReport:
    """
    Quadrature of int x J_mu(k x) J_nu(k' x) J_{mu-nu}(c x) dx against
    -(2 / (pi c^2)) sin(nu pi) a^mu b^nu D with k, k', a, b, D from (eta, zeta).
    """
    grid = default_closed_grid(seed) if grid is None else list(grid)
    cfg = cfg or QuadratureConfig()

    abs_residuals, rel_residuals, failures = [], [], []
    for idx, point in enumerate(grid):
        k, kp, closed, _, _ = closed_integral_value(point)
        try:
            value = triple_bessel_integral(point.mu, point.nu, point.mu - point.nu, k, kp, point.c, cfg)
        except NumericalError as exc:
            failures.append(f"sample {idx}: {exc}")
            continue
        diff = abs(value - closed)
        abs_residuals.append(diff)
        rel_residuals.append(_relative(diff, closed))

    _, _, a_sym, b_sym, d_sym = trig_shape(math.pi / 6, math.pi / 6)
    details = {"symmetric_point": {"a": a_sym, "b": b_sym, "D": d_sym}}
    return IdentityReport.from_residuals(
        "closed_integral", abs_residuals, rel_residuals, tolerance,
        samples=len(grid), failures=failures, details=details,
    )


def fit_global_phase(numeric: np.ndarray, closed: np.ndarray) -> float:
    """Least-squares phase theta minimizing |numeric - exp(i theta) closed|."""
    return float(np.angle(np.sum(numeric * np.conj(closed))))


def check_phi_integral(
    q_values: Sequence[int] = tuple(range(-10, 11)),
    z_values: Sequence[float] = (0.5, 2.0, 10.0),
    cfg: Optional[QuadratureConfig] = None,
    tolerance: float = PHI_TOL,
) -> IdentityReport:
    """Angular quadrature against its closed form, up to one fitted global phase."""
    cfg = cfg or QuadratureConfig(abs_tol=1e-13, rel_tol=1e-12)

    pairs = [(int(q), float(z)) for z in z_values for q in q_values]
    numeric = np.array([phi_integral(q, z, cfg) for q, z in pairs])
    closed = np.array([phi_integral_closed(q, z) for q, z in pairs])

    phase = fit_global_phase(numeric, closed)
    diff = np.abs(numeric - cmath.exp(1j * phase) * closed)
    # relative above unit magnitude, absolute below
    rel = diff / np.maximum(np.abs(closed), 1.0)

    details = {"fitted_phase": phase, "phase_offset_detected": abs(phase) > 1e-8}
    if details["phase_offset_detected"]:
        logger.warning("angular integral carries a global phase offset %.3e rad", phase)
    return IdentityReport.from_residuals("phi_integral", diff.tolist(), rel.tolist(), tolerance, details=details)


def fit_convergence_rate(orders: Sequence[int], errors: Sequence[float]) -> Optional[float]:
    """exp(slope) of a log-linear fit of err(N), using points above the noise floor."""
    usable = [(n, e) for n, e in zip(orders, errors) if e > NOISE_FLOOR]
    if len(usable) < 2:
        return None
    n, e = np.array(usable, dtype=float).T
    slope, _ = np.polyfit(n, np.log(e), 1)
    return float(math.exp(slope))


def check_geometric_resummation(
    point: Optional[ResummationPoint] = None,
    schedule: Sequence[int] = RESUMMATION_SCHEDULE,
    tolerance: float = RESUMMATION_TOL,
    stress: Optional[ResummationPoint] = None,
) -> IdentityReport:
    """
    Lowered-sector partial sums against the resummed closed form.

    The relative error at the last schedule entry is the residual. The
    measured geometric rate must lie within RATE_TOL of max(a, b), and at a
    stress point with a, b close to 1 every partial-sum error must sit under
    the remainder bound.
    """
    point = point or generic_point()
    stress = stress or stress_point()
    schedule = sorted(schedule)

    closed = lowered_sector_closed(point.flux, point.photon, point.pair)
    errors = [
        abs(lowered_sector_series(point.flux, point.photon, point.pair, n) - closed) / abs(closed)
        for n in schedule
    ]
    rho = params_for(point.photon, point.pair).rho
    rate = fit_convergence_rate(schedule, errors)

    failures = []
    if rate is None:
        failures.append("too few partial sums above the noise floor to fit a rate")
    elif abs(rate - rho) > RATE_TOL:
        failures.append(f"measured rate {rate:.4f} differs from max(a, b)={rho:.4f}")

    stress_closed = lowered_sector_closed(stress.flux, stress.photon, stress.pair)
    stress_rows = []
    for n in schedule:
        err = abs(lowered_sector_series(stress.flux, stress.photon, stress.pair, n) - stress_closed)
        bound = lowered_sector_bound(stress.flux, stress.photon, stress.pair, n)
        stress_rows.append({"n_max": n, "error": err, "bound": bound})
        if err > bound:
            failures.append(f"stress point: error {err:.3e} exceeds bound {bound:.3e} at n_max={n}")

    details = {
        "schedule": list(schedule),
        "relative_errors": errors,
        "measured_rate": rate,
        "max_ab": rho,
        "stress_max_ab": params_for(stress.photon, stress.pair).rho,
        "stress": stress_rows,
    }
    return IdentityReport.from_residuals(
        "geometric_resummation", [errors[-1] * abs(closed)], [errors[-1]], tolerance,
        samples=len(schedule), failures=failures, details=details,
    )


def check_structure_consistency(
    samples: int = 100,
    seed: int = DEFAULT_SEED,
    tolerance: float = STRUCTURE_TOL,
) -> IdentityReport:
    """Algebraic a, b, D from (k, k', kappa = 1) against their trigonometric values."""
    rng = np.random.default_rng(seed)
    points = [(math.pi / 6, math.pi / 6)]
    while len(points) < samples:
        eta, zeta = rng.uniform(0.02, math.pi / 2, size=2)
        if eta + zeta < math.pi / 2 - 0.1:
            points.append((eta, zeta))

    abs_residuals, rel_residuals = [], []
    for eta, zeta in points:
        k, kp, a_trig, b_trig, d_trig = trig_shape(eta, zeta)
        a, b, D = radial_shape(k, kp, 1.0)
        rel = max(abs(a - a_trig) / a_trig, abs(b - b_trig) / b_trig, abs(D - d_trig) / d_trig)
        abs_residuals.append(max(abs(a - a_trig), abs(b - b_trig), abs(D - d_trig)))
        rel_residuals.append(rel)

    return IdentityReport.from_residuals("structure_consistency", abs_residuals, rel_residuals, tolerance)


# ============ Suite ============

def run_all(
    seed: int = DEFAULT_SEED,
    cfg: Optional[QuadratureConfig] = None,
    tolerance: Optional[float] = None,
    jobs: int = 1,
) -> List[IdentityReport]:
    """Run the five checks; reports come back in declaration order whatever `jobs` is."""
    cfg = cfg or QuadratureConfig()

    def tol(default: float) -> float:
        return default if tolerance is None else tolerance

    checks: List[Callable[[], IdentityReport]] = [
        lambda: check_vanishing_integral(cfg=cfg, tolerance=tol(VANISHING_TOL), seed=seed),
        lambda: check_closed_integral(cfg=cfg, tolerance=tol(CLOSED_TOL), seed=seed),
        lambda: check_phi_integral(tolerance=tol(PHI_TOL)),
        lambda: check_geometric_resummation(tolerance=tol(RESUMMATION_TOL)),
        lambda: check_structure_consistency(seed=seed, tolerance=tol(STRUCTURE_TOL)),
    ]
    if jobs <= 1:
        reports = [check() for check in checks]
    else:
        with ThreadPoolExecutor(max_workers=jobs) as pool:
            reports = list(pool.map(lambda check: check(), checks))

    for report in reports:
        logger.info("%s: %s (max rel %.3e)", report.identity_name, "pass" if report.passed else "FAIL", report.max_rel_residual)
    return reports
