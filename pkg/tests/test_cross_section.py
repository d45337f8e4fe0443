import math

import pytest
from hypothesis import given, settings

from src.config import DEFAULT_ALPHA
from src.errors import IncidenceError, RegimeError, RegimeWarning
from src.physics.amplitude import closed_form_amplitude, params_for
from src.physics.cross_section import (
    PolarizationDensity,
    density_braces,
    differential_xsec,
    limit_regime_factor,
    nr_limit,
    polarization_density,
    projected_density,
    ur_limit,
    xsec_prefactor,
)
from src.physics.kinematics import Polarization, PhotonIn, decompose_flux, solve_pair
from src.physics.oracle import oracle_amplitude
from tests.strategies import points


def _near_threshold(offset, phi_k=1.0):
    kappa = 2.0 * (1.0 + offset)
    p_avail = math.sqrt((kappa / 2.0) ** 2 - 1.0)
    photon = PhotonIn(kappa=kappa, phi_k=phi_k)
    pair = solve_pair(kappa, 0.3 * p_avail, 0.2 * p_avail, 1.0, phi_perp=0.4, phip_perp=2.1)
    return photon, pair


def _forward(kappa, k_perp, k3, phi=0.5):
    photon = PhotonIn(kappa=kappa, phi_k=phi)
    pair = solve_pair(kappa, k_perp, k3, 1.0, phi_perp=phi, phip_perp=phi)
    return photon, pair


def _relative(full, approx):
    return abs(full - approx) / abs(full)


# ============ Densities ============

def test_density_vanishes_for_integer_flux(photon, pair):
    density = polarization_density(params_for(photon, pair), pair, decompose_flux(1.0))
    assert density == PolarizationDensity(lambda_s=0.0, lambda_p=0.0)


def test_p_density_vanishes_without_longitudinal_momentum(flux, photon):
    pair = solve_pair(3.0, 0.8, 0.0, 1.0, phi_perp=0.4, phip_perp=2.1)
    density = polarization_density(params_for(photon, pair), pair, flux)
    assert density.lambda_p == 0.0
    assert density.lambda_s > 0.0


def test_closed_density_matches_projection(flux, photon, pair):
    density = polarization_density(params_for(photon, pair), pair, flux)
    projected = projected_density(closed_form_amplitude(flux, photon, pair), photon, pair)
    assert projected.lambda_s == pytest.approx(density.lambda_s, rel=1e-10)
    assert projected.lambda_p == pytest.approx(density.lambda_p, rel=1e-10)


def test_oracle_projection_matches_density(flux, photon, pair):
    density = polarization_density(params_for(photon, pair), pair, flux)
    projected = projected_density(oracle_amplitude(flux, photon, pair).amplitude, photon, pair)
    assert projected.lambda_s == pytest.approx(density.lambda_s, rel=1e-9)
    assert projected.lambda_p == pytest.approx(density.lambda_p, rel=1e-9)


@settings(max_examples=10_000, deadline=None)
@given(points())
def test_densities_are_non_negative(point):
    flux, photon, pair = point
    density = polarization_density(params_for(photon, pair), pair, flux)
    assert density.lambda_s >= 0.0
    assert density.lambda_p >= 0.0


@settings(max_examples=200, deadline=None)
@given(points())
def test_braces_match_projected_amplitude(point):
    flux, photon, pair = point
    density = polarization_density(params_for(photon, pair), pair, flux)
    projected = projected_density(closed_form_amplitude(flux, photon, pair), photon, pair)
    scale = max(density.lambda_s, density.lambda_p)
    assert abs(projected.lambda_s - density.lambda_s) <= 1e-9 * scale
    assert abs(projected.lambda_p - density.lambda_p) <= 1e-9 * scale


def test_braces_swap_with_the_cross_term_sign(photon, pair):
    sp = params_for(photon, pair)
    brace_s, brace_p = density_braces(sp, 0.3)
    ab = sp.a * sp.b
    square = ab ** 0.6 * sp.sigma_plus_sq + ab ** -0.6 * sp.sigma_minus_sq
    assert brace_s + brace_p == pytest.approx(2.0 * square, rel=1e-13)


# ============ Cross section ============

def test_differential_xsec_uses_selected_polarization(flux, pair):
    for pol in ("s", "p"):
        photon = PhotonIn(kappa=3.0, phi_k=1.0, polarization=pol)
        point = differential_xsec(flux, photon, pair, DEFAULT_ALPHA)
        density = polarization_density(params_for(photon, pair), pair, flux)
        expected = xsec_prefactor(DEFAULT_ALPHA, 3.0, pair.k_perp, pair.kp_perp) * density.select(pol)
        assert point.value == pytest.approx(expected, rel=1e-14)
        assert point.polarization is Polarization(pol)
        assert point.value > 0.0


def test_differential_xsec_zero_for_integer_flux(photon, pair):
    assert differential_xsec(decompose_flux(-2.0), photon, pair, DEFAULT_ALPHA).value == 0.0


def test_differential_xsec_requires_normal_incidence(flux, pair):
    with pytest.raises(IncidenceError):
        differential_xsec(flux, PhotonIn(kappa=3.0, theta_k=0.9), pair, DEFAULT_ALPHA)


def test_xsec_prefactor_scales_with_alpha():
    assert xsec_prefactor(2.0, 3.0, 0.8, 1.2) == pytest.approx(2.0 * xsec_prefactor(1.0, 3.0, 0.8, 1.2))
    assert xsec_prefactor(1.0, 3.0, 0.8, 1.2) == pytest.approx(0.8 * 1.2 / (3.0 * (2.0 * math.pi) ** 3))


# ============ Near threshold ============

def test_nr_limit_has_no_d2(flux):
    photon, pair = _near_threshold(1e-3)
    assert nr_limit(flux, photon, pair).amplitude.d2 == 0


def test_nr_polarization_ratio(flux):
    photon, pair = _near_threshold(1e-3)
    limit = nr_limit(flux, photon, pair)
    ratio = limit.density.lambda_p / limit.density.lambda_s
    assert ratio == pytest.approx(pair.k3 ** 2 * limit.brace_p / limit.brace_s, rel=1e-12)


def test_full_polarization_ratio_approaches_nr_ratio(flux):
    deviations = []
    for offset in (1e-2, 1e-3, 1e-4):
        photon, pair = _near_threshold(offset)
        full = polarization_density(params_for(photon, pair), pair, flux)
        limit = nr_limit(flux, photon, pair)
        deviations.append(_relative(full.lambda_p / full.lambda_s, limit.density.lambda_p / limit.density.lambda_s))
    assert deviations[0] > deviations[1] > deviations[2]
    assert deviations[0] < 1e-2
    assert deviations[2] < 5e-4


def test_nr_limit_converges_toward_threshold(flux):
    deviations = []
    for offset in (1e-2, 1e-3, 1e-4):
        photon, pair = _near_threshold(offset)
        full = polarization_density(params_for(photon, pair), pair, flux)
        limit = nr_limit(flux, photon, pair)
        deviations.append(_relative(full.lambda_s, limit.density.lambda_s))
    assert deviations[0] > deviations[1] > deviations[2]
    assert deviations[2] < 0.1


def test_nr_limit_warns_outside_window(flux):
    photon, pair = _near_threshold(4.0)
    with pytest.warns(RegimeWarning):
        limit = nr_limit(flux, photon, pair)
    assert limit.regime_factor == pytest.approx(limit_regime_factor("nr", 10.0, 1.0))


def test_nr_limit_refuses_far_outside_window(flux):
    photon, pair = _near_threshold(14.0)
    with pytest.raises(RegimeError):
        nr_limit(flux, photon, pair)


# ============ High energy ============

def test_ur_limit_sector_ratio(flux):
    photon, pair = _forward(1000.0, 400.0, 20.0)
    sp = params_for(photon, pair)
    limit = ur_limit(sp, flux, pair)
    assert abs(sp.sigma_minus / sp.sigma_plus) == pytest.approx(limit.a_over_b, rel=1e-3)
    assert limit.sigma_minus == pytest.approx(limit.a_over_b * limit.sigma_plus, rel=1e-14)


def test_ur_limit_density_within_one_percent(flux):
    photon, pair = _forward(1000.0, 400.0, 20.0)
    sp = params_for(photon, pair)
    full = polarization_density(sp, pair, flux)
    limit = ur_limit(sp, flux, pair)
    assert _relative(full.lambda_s, limit.density.lambda_s) < 0.01
    assert _relative(full.lambda_p, limit.density.lambda_p) < 0.01


def test_ur_limit_warns_below_threshold_energy(flux):
    photon, pair = _forward(100.0, 40.0, 2.0)
    with pytest.warns(RegimeWarning):
        ur_limit(params_for(photon, pair), flux, pair)


def test_ur_limit_refuses_low_energy(flux):
    photon, pair = _forward(10.0, 4.0, 0.2)
    with pytest.raises(RegimeError):
        ur_limit(params_for(photon, pair), flux, pair)


def test_ur_limit_warns_for_wide_angles(flux):
    photon = PhotonIn(kappa=1000.0, phi_k=0.5)
    pair = solve_pair(1000.0, 400.0, 20.0, 1.0, phi_perp=0.9, phip_perp=0.5)
    with pytest.warns(RegimeWarning, match="collinear"):
        ur_limit(params_for(photon, pair), flux, pair)


def test_regime_factor_rejects_unknown_regime():
    with pytest.raises(ValueError):
        limit_regime_factor("relativistic", 3.0, 1.0)
