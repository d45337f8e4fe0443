"""
Physics core: special functions, kinematics, the closed-form amplitude,
the partial-wave oracle and the cross section.
"""

from .specfun import bessel_j, phi_integral, phi_integral_closed, triple_bessel_integral
from .kinematics import (
    FluxParam,
    PairOut,
    PhotonIn,
    Polarization,
    decompose_flux,
    momentum_excess_ok,
    pair_from_transverse,
    solve_pair,
)
from .amplitude import (
    AmplitudeVector,
    StructureParams,
    closed_form_amplitude,
    params_for,
    selection_rule,
    structure_params,
)
from .oracle import OracleResult, Tier, oracle_amplitude
from .cross_section import (
    NRLimit,
    PolarizationDensity,
    URLimit,
    XsecPoint,
    differential_xsec,
    nr_limit,
    polarization_density,
    projected_density,
    ur_limit,
)

__all__ = [
    # Special functions
    "bessel_j", "phi_integral", "phi_integral_closed", "triple_bessel_integral",
    # Kinematics
    "FluxParam", "PairOut", "PhotonIn", "Polarization",
    "decompose_flux", "momentum_excess_ok", "pair_from_transverse", "solve_pair",
    # Amplitude
    "AmplitudeVector", "StructureParams", "closed_form_amplitude", "params_for",
    "selection_rule", "structure_params",
    "OracleResult", "Tier", "oracle_amplitude",
    # Cross section
    "NRLimit", "PolarizationDensity", "URLimit", "XsecPoint",
    "differential_xsec", "nr_limit", "polarization_density", "projected_density", "ur_limit",
]
