"""
Identity reports: the result record of one check, a text table and a JSON document.
"""

import json
import math
from typing import Any, Dict, Iterable, List, Optional, Sequence

from pydantic import BaseModel, ConfigDict, Field, model_validator

REPORT_SCHEMA = 1


class IdentityReport(BaseModel):
    """Residuals of one identity check over all of its samples."""

    model_config = ConfigDict(frozen=True)

    identity_name: str
    max_abs_residual: float = Field(ge=0.0)
    max_rel_residual: float = Field(ge=0.0)
    samples: int = Field(ge=0)
    passed: bool
    tolerance: float = Field(gt=0.0)
    failures: List[str] = Field(default_factory=list)
    details: Dict[str, Any] = Field(default_factory=dict)

    @model_validator(mode="after")
    def _check_verdict(self) -> "IdentityReport":
        within = self.max_rel_residual <= self.tolerance and not self.failures
        if self.passed != within:
            raise ValueError("passed must hold exactly when the residual is within tolerance")
        return self

    @classmethod
    def from_residuals(
        cls,
        name: str,
        abs_residuals: Sequence[float],
        rel_residuals: Sequence[float],
        tolerance: float,
        samples: Optional[int] = None,
        failures: Optional[List[str]] = None,
        details: Optional[Dict[str, Any]] = None,
    ) -> "IdentityReport":
        """
        Build a report from per-sample residuals.

        A non-finite residual counts as a failure. The verdict is taken on
        the relative residual; checks whose target is zero pass their
        absolute residual as the relative one.
        """
        failures = list(failures or [])
        abs_clean = [r for r in abs_residuals if math.isfinite(r)]
        rel_clean = [r for r in rel_residuals if math.isfinite(r)]
        if len(abs_clean) != len(abs_residuals) or len(rel_clean) != len(rel_residuals):
            failures.append("non-finite residual")
        max_abs = max(abs_clean, default=0.0)
        max_rel = max(rel_clean, default=0.0)
        return cls(
            identity_name=name,
            max_abs_residual=max_abs,
            max_rel_residual=max_rel,
            samples=len(abs_residuals) if samples is None else samples,
            passed=max_rel <= tolerance and not failures,
            tolerance=tolerance,
            failures=failures,
            details=details or {},
        )


def format_table(reports: Iterable[IdentityReport]) -> str:
    """Human-readable table, one row per identity."""
    header = f"{'identity':<28} {'samples':>7} {'max abs':>11} {'max rel':>11} {'tolerance':>10}  verdict"
    lines = [header, "-" * len(header)]
    for r in reports:
        verdict = "PASS" if r.passed else "FAIL"
        lines.append(
            f"{r.identity_name:<28} {r.samples:>7d} {r.max_abs_residual:>11.3e} "
            f"{r.max_rel_residual:>11.3e} {r.tolerance:>10.1e}  {verdict}"
        )
        for failure in r.failures:
            lines.append(f"    ! {failure}")
    return "\n".join(lines)


def report_document(reports: Iterable[IdentityReport], seed: int) -> Dict[str, Any]:
    reports = list(reports)
    return {
        "schema": REPORT_SCHEMA,
        "seed": seed,
        "passed": all(r.passed for r in reports),
        "identities": [r.model_dump() for r in reports],
    }


def dumps_report(reports: Iterable[IdentityReport], seed: int) -> str:
    return json.dumps(report_document(reports, seed), indent=2, sort_keys=True)
