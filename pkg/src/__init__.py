"""
ABPAIR - scalar pair production on an Aharonov-Bohm flux line

Closed-form amplitude and differential cross section for a linearly polarized
photon creating a charged scalar pair near an infinitely thin flux string,
cross-checked against a partial-wave oracle and an identity suite.
"""

__version__ = "1.0.0"
