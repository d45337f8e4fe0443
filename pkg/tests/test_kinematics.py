import math

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from pydantic import ValidationError
from scipy import optimize

from src.errors import BelowThresholdError, IncidenceError, KinematicsError
from src.physics.kinematics import (
    PairOut,
    PhotonIn,
    decompose_flux,
    momentum_excess_ok,
    pair_from_transverse,
    require_closed_form_point,
    solve_pair,
    wrap_angle,
)
from tests.strategies import points


@pytest.mark.parametrize(
    "f, int_part, delta",
    [(2.3, 2, 0.3), (-0.7, -1, 0.3), (3.0, 3, 0.0), (0.0, 0, 0.0), (-2.0, -2, 0.0)],
)
def test_decompose_flux(f, int_part, delta):
    flux = decompose_flux(f)
    assert flux.int_part == int_part
    assert flux.delta == pytest.approx(delta, abs=1e-12)


@given(st.floats(min_value=-1e6, max_value=1e6, allow_nan=False))
def test_decompose_flux_properties(f):
    flux = decompose_flux(f)
    assert 0.0 <= flux.delta < 1.0
    assert flux.int_part + flux.delta == pytest.approx(f, abs=1e-9)


@pytest.mark.parametrize("f", [float("nan"), float("inf")])
def test_decompose_flux_rejects_non_finite(f):
    with pytest.raises(KinematicsError):
        decompose_flux(f)


def test_solve_pair_reference_point(pair):
    assert pair.kp_perp == pytest.approx(1.36503, abs=1e-4)
    assert pair.kp3 == -pair.k3
    assert pair.eps + pair.eps_bar == pytest.approx(3.0, rel=1e-14)


def _bisected_kp_perp(kappa, k_perp, k3, M):
    eps = math.sqrt(k_perp ** 2 + k3 ** 2 + M ** 2)
    total = lambda kp: eps + math.sqrt(kp ** 2 + k3 ** 2 + M ** 2) - kappa
    return optimize.bisect(total, 0.0, kappa, xtol=1e-15, rtol=1e-15)


@pytest.mark.parametrize(
    "kappa, k_perp, k3, M",
    [(3.0, 0.8, 0.2, 1.0), (2.05, 0.1, -0.05, 1.0), (10.0, 3.0, 1.5, 1.0), (7.5, 0.4, 0.0, 2.5), (100.0, 40.0, -2.0, 1.0)],
)
def test_solve_pair_matches_bisection(kappa, k_perp, k3, M):
    pair = solve_pair(kappa, k_perp, k3, M)
    assert pair.kp_perp == pytest.approx(_bisected_kp_perp(kappa, k_perp, k3, M), rel=1e-12)


@pytest.mark.parametrize("M", [1.0, 2.5])
def test_solve_pair_symmetric_split(M):
    # kappa = 4M with k3 = 0 and eps = 2M gives both particles the same momentum
    k_perp = math.sqrt(3.0) * M
    pair = solve_pair(4.0 * M, k_perp, 0.0, M)
    assert pair.kp_perp == pytest.approx(k_perp, rel=1e-14)
    assert pair.eps == pytest.approx(pair.eps_bar, rel=1e-14)


@pytest.mark.parametrize("f", [0.3, -0.7, 2.25, 0.0, 1e-3, 0.999])
@pytest.mark.parametrize("n", range(-5, 6))
def test_integer_shift_keeps_delta(f, n):
    base, shifted = decompose_flux(f), decompose_flux(f + n)
    assert shifted.delta == pytest.approx(base.delta, abs=1e-12)
    assert shifted.int_part == base.int_part + n


@pytest.mark.parametrize("kappa", [1.5, 2.0])
def test_solve_pair_below_threshold(kappa):
    with pytest.raises(BelowThresholdError, match="below threshold"):
        solve_pair(kappa, 0.1, 0.0, 1.0)


def test_solve_pair_no_room_for_antiparticle():
    with pytest.raises(KinematicsError):
        solve_pair(3.0, 1.9, 0.0, 1.0)


def test_solve_pair_forbidden_longitudinal_momentum():
    with pytest.raises(KinematicsError):
        solve_pair(3.0, 0.1, 1.15, 1.0)


@settings(max_examples=10_000, deadline=None)
@given(points())
def test_energy_and_momentum_conservation(point):
    _, photon, pair = point
    assert pair.eps + pair.eps_bar == pytest.approx(photon.kappa, rel=1e-12)
    assert pair.k3 + pair.kp3 == 0.0
    assert momentum_excess_ok(pair, photon)


def test_momentum_excess_fails_at_grazing_incidence(pair):
    grazing = PhotonIn(kappa=3.0, theta_k=0.2)
    assert not momentum_excess_ok(pair, grazing)


def test_closed_form_point_requires_normal_incidence(pair):
    with pytest.raises(IncidenceError, match="normal incidence"):
        require_closed_form_point(pair, PhotonIn(kappa=3.0, theta_k=1.0))


def test_closed_form_point_requires_energy_conservation(pair):
    with pytest.raises(KinematicsError, match="energy conservation"):
        require_closed_form_point(pair, PhotonIn(kappa=3.5))


def test_pair_rejects_off_shell_energies():
    with pytest.raises(ValidationError):
        PairOut(k_perp=0.5, kp_perp=0.5, eps=1.0, eps_bar=1.2, mass=1.0)


def test_pair_from_transverse_solves_mass():
    pair = pair_from_transverse(0.8, 1.2, 3.0, k3=0.1)
    assert pair.eps + pair.eps_bar == pytest.approx(3.0, rel=1e-13)
    assert 0.0 < pair.mass < 1.5
    assert pair.kp_perp == 1.2


def test_pair_from_transverse_needs_momentum_excess():
    with pytest.raises(KinematicsError):
        pair_from_transverse(1.5, 1.6, 3.0)


@pytest.mark.parametrize(
    "phi, wrapped",
    [(0.0, 0.0), (2.0 * math.pi, 0.0), (-0.5, 2.0 * math.pi - 0.5), (7.0, 7.0 - 2.0 * math.pi)],
)
def test_wrap_angle(phi, wrapped):
    assert wrap_angle(phi) == pytest.approx(wrapped, abs=1e-15)
