import math

import numpy as np
import pytest
from hypothesis import given, settings

from src.config import QuadratureConfig
from src.errors import KinematicsError, TruncationError
from src.physics.amplitude import closed_form_amplitude, params_for, selection_rule, trig_shape
from src.physics.kinematics import PhotonIn, decompose_flux, pair_from_transverse, solve_pair
from src.physics.oracle import (
    QuadratureRadial,
    RadialTable,
    TermClass,
    Tier,
    classify,
    default_m_max,
    lowered_sector_bound,
    lowered_sector_closed,
    lowered_sector_order,
    lowered_sector_series,
    oracle_amplitude,
    truncation_bound,
)
from src.physics.specfun import triple_bessel_integral
from tests.strategies import points


def _random_points(count, seed=0x5EED):
    rng = np.random.default_rng(seed)
    deltas = (0.1, 0.3, 0.5, 0.7, 0.9)
    out = []
    for idx in range(count):
        kappa = rng.uniform(2.2, 8.0)
        p_avail = math.sqrt((kappa / 2.0) ** 2 - 1.0)
        flux = decompose_flux(rng.integers(-2, 3) + deltas[idx % len(deltas)])
        photon = PhotonIn(kappa=kappa, phi_k=rng.uniform(0, 2 * math.pi))
        pair = solve_pair(
            kappa, rng.uniform(0.05, 0.9) * p_avail, rng.uniform(-0.5, 0.5) * p_avail, 1.0,
            phi_perp=rng.uniform(0, 2 * math.pi), phip_perp=rng.uniform(0, 2 * math.pi),
        )
        out.append((flux, photon, pair))
    return out


@pytest.mark.parametrize(
    "m_bar, mp_bar, expected",
    [(-1, -1, TermClass.T1), (-1, 0, TermClass.T2), (0, -1, TermClass.T3), (0, 0, TermClass.T4)],
)
def test_classify(m_bar, mp_bar, expected):
    assert classify(m_bar, mp_bar) is expected


def test_tier_a_matches_closed_form_on_random_points():
    for flux, photon, pair in _random_points(100):
        closed = closed_form_amplitude(flux, photon, pair)
        result = oracle_amplitude(flux, photon, pair)
        scale = closed.norm()
        for exact, summed in zip(closed.as_array(), result.amplitude.as_array()):
            assert abs(exact - summed) <= 1e-10 * scale


def test_tier_a_reference_point(flux, photon, pair):
    result = oracle_amplitude(flux, photon, pair, m_max=40)
    closed = closed_form_amplitude(flux, photon, pair)
    assert (closed - result.amplitude).norm() < 1e-10 * closed.norm()
    assert result.m_max == 40
    assert result.tier is Tier.A


@settings(max_examples=25, deadline=None)
@given(points())
def test_truncation_bound_covers_the_tail(point):
    flux, photon, pair = point
    closed = closed_form_amplitude(flux, photon, pair)
    sp = params_for(photon, pair)
    for m_max in (3, 8):
        result = oracle_amplitude(flux, photon, pair, m_max=m_max)
        assert (closed - result.amplitude).norm() <= truncation_bound(sp, flux, pair, m_max) + 1e-14


def test_default_m_max_meets_tail_target(photon, pair):
    sp = params_for(photon, pair)
    m = default_m_max(sp)
    assert sp.rho ** m < 1e-14 * (1.0 - sp.rho)
    assert sp.rho ** (m - 1) >= 1e-14 * (1.0 - sp.rho)


def test_default_m_max_refuses_slow_tails():
    # eta = zeta = 0.78 puts k_perp + kp_perp within 1e-4 of kappa_perp and a = b near 0.989
    k, kp, _, _, _ = trig_shape(0.78, 0.78)
    pair = pair_from_transverse(k, kp, 1.0)
    sp = params_for(PhotonIn(kappa=1.0), pair)
    assert sp.rho > 0.98
    with pytest.raises(TruncationError):
        default_m_max(sp)


def test_forbidden_terms_vanish_exactly(flux, photon, pair):
    result = oracle_amplitude(flux, photon, pair, m_max=6, keep_terms=True)
    assert len(result.terms) == 13 * 13
    for term in result.terms:
        if not selection_rule(term.m_bar, term.mp_bar):
            assert term.contribution == (0j, 0j, 0j)


def test_only_opposite_sense_terms_contribute(flux, photon, pair):
    result = oracle_amplitude(flux, photon, pair, m_max=6, keep_terms=True)
    classes = {term.term_class for term in result.terms if term.magnitude > 0}
    assert classes <= {TermClass.T2, TermClass.T3}


def test_integer_flux_oracle_is_zero(photon, pair):
    result = oracle_amplitude(decompose_flux(2.0), photon, pair, m_max=10)
    assert result.amplitude.norm() < 1e-14


def test_radial_table_rejects_untabulated_orders():
    table = RadialTable(0.3, 0.4, 1.0)
    with pytest.raises(KinematicsError):
        table(np.array([0.5]), np.array([0.2]), np.array([3.0]))


def test_radial_table_symmetric_value():
    k = math.sqrt(3.0) / 4.0
    value = RadialTable(k, k, 1.0)(np.array([0.7]), np.array([0.3]), np.array([0.4]))[0]
    expected = -2.0 / math.pi * math.sin(0.3 * math.pi) * 3.0 ** -0.5 * 2.0
    assert value == pytest.approx(expected, rel=1e-13)


# ============ Lowered-particle sector ============

def test_lowered_sector_converges_to_closed_form(flux, photon, pair):
    closed = lowered_sector_closed(flux, photon, pair)
    series = lowered_sector_series(flux, photon, pair, 40)
    assert abs(series - closed) < 2e-12 * abs(closed)


def test_lowered_sector_remainder_bound(flux, photon, pair):
    closed = lowered_sector_closed(flux, photon, pair)
    for n_max in (2, 5, 10, 20):
        err = abs(lowered_sector_series(flux, photon, pair, n_max) - closed)
        assert err <= lowered_sector_bound(flux, photon, pair, n_max)


def test_lowered_sector_vanishes_for_integer_flux(photon, pair):
    flux = decompose_flux(1.0)
    assert lowered_sector_closed(flux, photon, pair) == 0
    assert lowered_sector_series(flux, photon, pair, 10) == 0




def test_lowered_sector_stops_at_series_tol(flux, photon, pair):
    closed = lowered_sector_closed(flux, photon, pair)
    series = lowered_sector_series(flux, photon, pair)
    assert abs(series - closed) <= 2e-12 * abs(closed)


def test_looser_series_tol_stops_earlier(flux, photon, pair):
    loose = QuadratureConfig(series_tol=1e-4)
    assert lowered_sector_order(flux, photon, pair, loose) < lowered_sector_order(flux, photon, pair, QuadratureConfig())
    closed = lowered_sector_closed(flux, photon, pair)
    assert abs(lowered_sector_series(flux, photon, pair, cfg=loose) - closed) <= 1.01e-4 * abs(closed)


# ============ Tier B ============

@pytest.mark.parametrize(
    "orders, outside",
    [
        ((0.3, -1.3, -1.0), True),    # x + y = Q with an order below -1
        ((-0.7, -0.3, 1.0), True),    # x + y = -Q with x + y < 0
        ((0.3, 0.7, 1.0), False),     # vanishing identity in its regime
        ((0.7, 0.3, 0.4), False),     # surviving identity
    ],
)
def test_outside_regime_classification(orders, outside):
    assert QuadratureRadial.outside_regime(*orders) is outside


@pytest.mark.slow
@pytest.mark.parametrize("index", range(10))
def test_tier_b_matches_tier_a(index):
    flux, photon, pair = _random_points(10)[index]
    tier_a = oracle_amplitude(flux, photon, pair, m_max=3)
    tier_b = oracle_amplitude(flux, photon, pair, m_max=3, tier=Tier.B, cfg=QuadratureConfig())
    assert tier_b.quadratures > 0
    assert tier_b.identity_gap is not None
    assert (tier_a.amplitude - tier_b.amplitude).norm() < 1e-6 * tier_a.amplitude.norm()


@pytest.mark.slow
def test_tier_b_measures_identity_gap(flux, photon, pair, cfg):
    # the (0, 0) term carries I(delta, -1 - delta, -1), which the vanishing identity sets to zero
    direct = triple_bessel_integral(0.3, -1.3, -1.0, pair.k_perp, pair.kp_perp, photon.kappa_perp, cfg)
    assert direct == pytest.approx(0.10715, rel=1e-3)

    closed = closed_form_amplitude(flux, photon, pair)
    result = oracle_amplitude(flux, photon, pair, m_max=2, tier=Tier.B, cfg=cfg)
    assert result.gap_integrals >= 1
    assert result.identity_gap.norm() == pytest.approx(1.106 * closed.norm(), rel=0.02)

    tier_a = oracle_amplitude(flux, photon, pair, m_max=2)
    assert tier_a.identity_gap is None
    assert (tier_a.amplitude - result.amplitude).norm() < 1e-6 * tier_a.amplitude.norm()
