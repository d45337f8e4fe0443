"""
Identity suite pinning the analytic steps behind the closed-form amplitude.
"""

from .identities import (
    check_closed_integral,
    check_geometric_resummation,
    check_phi_integral,
    check_structure_consistency,
    check_vanishing_integral,
    run_all,
)
from .report import IdentityReport, dumps_report, format_table

__all__ = [
    # Checks
    "check_vanishing_integral",
    "check_closed_integral",
    "check_phi_integral",
    "check_geometric_resummation",
    "check_structure_consistency",
    "run_all",
    # Reports
    "IdentityReport",
    "dumps_report",
    "format_table",
]
