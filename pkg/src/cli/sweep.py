"""
Grid sweeps of the differential cross section.

Points are evaluated on a thread pool of up to `jobs` workers; rows come back
in grid order regardless of completion order.
"""

import math
from concurrent.futures import ThreadPoolExecutor
from typing import Dict, List, Literal, Optional

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, model_validator

from ..config import RunConfig
from ..errors import PhysicsInputError
from ..logging_config import get_logger
from ..physics.amplitude import params_for
from ..physics.cross_section import polarization_density, xsec_prefactor
from ..physics.kinematics import PhotonIn, Polarization, decompose_flux, require_closed_form_point, solve_pair

logger = get_logger(__name__)

Axis = Literal["k_perp", "k3", "phi_perp", "phip_perp", "delta", "kappa"]
SWEEP_PARAMS = ("kappa", "k_perp", "k3", "phi_perp", "phip_perp", "delta")


class SweepSpec(BaseModel):
    """One swept axis over [start, stop] (both included) with the other parameters fixed."""

    model_config = ConfigDict(frozen=True)

    axis: Axis
    start: float
    stop: float
    steps: int = Field(ge=2)
    fixed: Dict[str, float] = Field(default_factory=dict)
    phi_k: float = 0.0

    @model_validator(mode="after")
    def _check(self) -> "SweepSpec":
        if not self.start < self.stop:
            raise ValueError(f"sweep needs start < stop (got {self.start:g}, {self.stop:g})")
        missing = [name for name in SWEEP_PARAMS if name != self.axis and name not in self.fixed]
        if missing:
            raise ValueError(f"sweep is missing fixed parameters: {', '.join(missing)}")
        unknown = sorted(set(self.fixed) - set(SWEEP_PARAMS))
        if unknown:
            raise ValueError(f"unknown sweep parameters: {', '.join(unknown)}")
        return self

    def values(self) -> np.ndarray:
        return np.linspace(self.start, self.stop, self.steps)

    def points(self) -> List[Dict[str, float]]:
        return [{**self.fixed, self.axis: float(value)} for value in self.values()]


class SweepRow(BaseModel):
    model_config = ConfigDict(frozen=True)

    index: int
    params: Dict[str, float]
    lambda_s: Optional[float] = None
    lambda_p: Optional[float] = None
    dsigma: Optional[float] = None
    reason: str = ""

    @property
    def skipped(self) -> bool:
        return bool(self.reason)


def evaluate_point(index: int, params: Dict[str, float], config: RunConfig, polarization: Polarization, phi_k: float = 0.0) -> SweepRow:
    """Cross section at one grid point; physics rejections become skipped rows."""
    try:
        flux = decompose_flux(math.floor(config.flux_f) + params["delta"])
        photon = PhotonIn(kappa=params["kappa"], phi_k=phi_k, polarization=polarization)
        pair = solve_pair(
            params["kappa"], params["k_perp"], params["k3"], config.mass,
            phi_perp=params["phi_perp"], phip_perp=params["phip_perp"],
        )
        require_closed_form_point(pair, photon)
        density = polarization_density(params_for(photon, pair), pair, flux)
    except PhysicsInputError as exc:
        logger.debug("sweep point %d skipped: %s", index, exc)
        return SweepRow(index=index, params=params, reason=f"{type(exc).__name__}: {exc}")

    dsigma = xsec_prefactor(config.alpha, photon.kappa, pair.k_perp, pair.kp_perp) * density.select(polarization)
    return SweepRow(
        index=index, params=params,
        lambda_s=density.lambda_s, lambda_p=density.lambda_p, dsigma=dsigma,
    )


def run_sweep(spec: SweepSpec, config: RunConfig, polarization: Polarization) -> List[SweepRow]:
    points = spec.points()
    logger.info("sweeping %s over %d points with %d job(s)", spec.axis, len(points), config.jobs)

    def task(item):
        index, params = item
        return evaluate_point(index, params, config, polarization, spec.phi_k)

    if config.jobs <= 1:
        return [task(item) for item in enumerate(points)]
    with ThreadPoolExecutor(max_workers=config.jobs) as pool:
        # map preserves submission order
        return list(pool.map(task, enumerate(points)))
