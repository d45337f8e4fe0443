"""
Hypothesis strategies for valid kinematic points (M = 1, normal incidence).
"""

import math

from hypothesis import strategies as st

from src.physics.kinematics import PhotonIn, decompose_flux, solve_pair

angles = st.floats(min_value=0.0, max_value=2.0 * math.pi, allow_nan=False)
deltas = st.floats(min_value=0.01, max_value=0.99, allow_nan=False)


@st.composite
def points(draw, kappa_range=(2.2, 12.0), delta=deltas, int_part=st.integers(-3, 3)):
    """(flux, photon, pair) with momenta as fractions of the momentum available per particle."""
    kappa = draw(st.floats(*kappa_range, allow_nan=False))
    p_avail = math.sqrt((kappa / 2.0) ** 2 - 1.0)
    k_perp = draw(st.floats(0.05, 0.9)) * p_avail
    k3 = draw(st.floats(-0.5, 0.5)) * p_avail
    flux = decompose_flux(draw(int_part) + draw(delta))
    photon = PhotonIn(kappa=kappa, phi_k=draw(angles), polarization=draw(st.sampled_from(["s", "p"])))
    pair = solve_pair(kappa, k_perp, k3, 1.0, phi_perp=draw(angles), phip_perp=draw(angles))
    return flux, photon, pair
