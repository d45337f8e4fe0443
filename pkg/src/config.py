"""
Run configuration.

Defaults live here and can be overridden, in increasing order of precedence,
by environment variables (optionally from a .env file), a flat key=value
config file, and command-line flags.
"""

import os
from pathlib import Path
from typing import Any, Dict, Literal, Mapping, Optional, Tuple

from dotenv import load_dotenv
from pydantic import BaseModel, ConfigDict, Field, ValidationError, field_validator, model_validator

from .errors import ConfigError

load_dotenv()

# Configuration
DEFAULT_ALPHA = 1.0 / 137.035999
DEFAULT_SEED = 0x5EED
ENV_KEYS = {
    "mass": "AB_MASS",
    "alpha": "AB_ALPHA",
    "flux_f": "AB_FLUX",
    "seed": "AB_SEED",
    "jobs": "AB_JOBS",
    "log_level": "AB_LOG_LEVEL",
}


class QuadratureConfig(BaseModel):
    """Tolerances and tail handling for every numerical integral."""

    model_config = ConfigDict(frozen=True, extra="forbid")

    abs_tol: float = Field(1e-12, gt=0)
    rel_tol: float = Field(1e-8, gt=0)
    series_tol: float = Field(1e-12, gt=0)
    max_subdivisions: int = Field(500, ge=1)
    damping_sequence: Tuple[float, ...] = (0.1, 0.05, 0.025, 0.0125)
    tail_method: Literal["rotated", "damped"] = "rotated"
    extrapolation_tol: float = Field(1e-5, gt=0)

    @field_validator("damping_sequence", mode="before")
    @classmethod
    def _split_sequence(cls, value: Any) -> Any:
        if isinstance(value, str):
            return tuple(float(part) for part in value.split(",") if part.strip())
        return value

    @field_validator("damping_sequence")
    @classmethod
    def _check_sequence(cls, value: Tuple[float, ...]) -> Tuple[float, ...]:
        if len(value) < 2:
            raise ValueError("damping_sequence needs at least two values")
        if any(eps <= 0 for eps in value):
            raise ValueError("damping_sequence values must be positive")
        if any(later >= earlier for earlier, later in zip(value, value[1:])):
            raise ValueError("damping_sequence must be strictly decreasing")
        return value


class RunConfig(BaseModel):
    """Everything a CLI run needs besides the kinematic point."""

    model_config = ConfigDict(frozen=True, extra="forbid")

    mass: float = Field(1.0, gt=0)
    alpha: float = Field(DEFAULT_ALPHA, gt=0)
    flux_f: float = 0.3
    tolerances: QuadratureConfig = Field(default_factory=QuadratureConfig)
    seed: int = DEFAULT_SEED
    output_path: str = ""
    format: Literal["csv", "json"] = "csv"
    jobs: int = Field(1, ge=1)
    m_max: Optional[int] = Field(None, ge=1)
    oracle: Optional[Literal["tierA", "tierB"]] = None
    log_level: str = "WARNING"

    @field_validator("seed", mode="before")
    @classmethod
    def _parse_seed(cls, value: Any) -> Any:
        # accepts hex literals such as 0x5EED
        if isinstance(value, str):
            return int(value.strip(), 0)
        return value

    @model_validator(mode="after")
    def _check_flux(self) -> "RunConfig":
        if self.flux_f != self.flux_f or abs(self.flux_f) == float("inf"):
            raise ValueError("flux_f must be finite")
        return self


# ============ Loading ============

def parse_config_file(path: Path) -> Dict[str, Any]:
    """Read a flat key=value file into a nested dict (dotted keys nest)."""
    values: Dict[str, Any] = {}
    try:
        lines = Path(path).read_text().splitlines()
    except OSError as exc:
        raise ConfigError(f"cannot read config file {path}: {exc}") from exc

    for lineno, raw in enumerate(lines, start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"{path}:{lineno}: expected key=value, got {raw!r}")
        key, value = (part.strip() for part in line.split("=", 1))
        _assign(values, key, value, f"{path}:{lineno}")
    return values


def _assign(target: Dict[str, Any], key: str, value: Any, where: str) -> None:
    head, _, rest = key.partition(".")
    if rest:
        if head != "tolerances":
            raise ConfigError(f"{where}: unknown section {head!r}")
        if rest not in QuadratureConfig.model_fields:
            raise ConfigError(f"{where}: unknown key {key!r}")
        target.setdefault("tolerances", {})[rest] = value
        return
    if head not in RunConfig.model_fields or head == "tolerances":
        raise ConfigError(f"{where}: unknown key {key!r}")
    target[head] = value


def env_overrides(environ: Optional[Mapping[str, str]] = None) -> Dict[str, Any]:
    """Collect AB_* environment overrides."""
    environ = os.environ if environ is None else environ
    return {field: environ[var] for field, var in ENV_KEYS.items() if var in environ}


def _merge(base: Dict[str, Any], extra: Mapping[str, Any]) -> Dict[str, Any]:
    merged = dict(base)
    for key, value in extra.items():
        if value is None:
            continue
        if key == "tolerances":
            tolerances = dict(merged.get("tolerances", {}))
            tolerances.update({k: v for k, v in value.items() if v is not None})
            merged["tolerances"] = tolerances
        else:
            merged[key] = value
    return merged


def load_run_config(
    path: Optional[Path] = None,
    overrides: Optional[Mapping[str, Any]] = None,
    environ: Optional[Mapping[str, str]] = None,
) -> RunConfig:
    """Build a RunConfig with precedence flags > file > environment > defaults.

    Args:
        path: optional key=value config file
        overrides: flag values; None entries are ignored
        environ: environment mapping, os.environ by default
    """
    values = env_overrides(environ)
    if path is not None:
        values = _merge(values, parse_config_file(path))
    if overrides:
        values = _merge(values, overrides)
    try:
        return RunConfig(**values)
    except ValidationError as exc:
        raise ConfigError(f"invalid configuration: {exc}") from exc
