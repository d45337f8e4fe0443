"""
Command-line front end.

Usage:
    python -m src.cli amplitude --kappa 3 --k-perp 0.8 --k3 0.2 --flux 0.3 --oracle tierA
    python -m src.cli xsec --axis delta --start 0 --stop 1 --steps 11 --out sweep.csv --gnuplot-script
    python -m src.cli verify --seed 42
    python -m src.cli limits --regime nr

Exit codes: 0 success, 1 internal or numerical failure, 2 invalid physics input.
"""

import argparse
import math
import sys
from pathlib import Path
from typing import Any, Callable, Dict, List, Optional

from pydantic import ValidationError

from ..config import RunConfig, load_run_config
from ..errors import ABPairError, ConfigError
from ..logging_config import configure_logging, get_logger
from ..physics.amplitude import closed_form_amplitude, params_for
from ..physics.cross_section import (
    limit_regime_factor,
    nr_limit,
    polarization_density,
    projected_density,
    ur_limit,
)
from ..physics.kinematics import NORMAL_INCIDENCE, PhotonIn, Polarization, decompose_flux, solve_pair
from ..physics.oracle import oracle_amplitude
from ..verify.identities import run_all
from ..verify.report import dumps_report, format_table
from .output import SWEEP_COLUMNS, gnuplot_path, gnuplot_script, render, sweep_records, write_text
from .sweep import SWEEP_PARAMS, SweepSpec, run_sweep

logger = get_logger(__name__)

# Defaults for the kinematic point
DEFAULT_POINT = {
    "kappa": 3.0,
    "k_perp": 0.8,
    "k3": 0.2,
    "phi_perp": 0.4,
    "phip_perp": 2.1,
    "phi_k": 1.0,
}
DEFAULT_REPORT = "verify_report.json"
NR_OFFSETS = (1e-2, 1e-3, 1e-4)
UR_KAPPAS = (1e2, 1e3)
# limits place the particle momenta at fixed fractions of the momentum available per particle
NR_FRACTIONS = (0.3, 0.2)
UR_FRACTIONS = (0.4, 0.02)


# ============ Arguments ============

def _common_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", type=Path, help="key=value configuration file")
    common.add_argument("--mass", type=float)
    common.add_argument("--alpha", type=float)
    flux = common.add_mutually_exclusive_group()
    flux.add_argument("--flux", type=float, dest="flux_f", help="flux in units of the flux quantum")
    flux.add_argument("--delta", type=float, help="fractional flux (integer part zero)")
    common.add_argument("--kappa", type=float)
    common.add_argument("--k-perp", type=float, dest="k_perp")
    common.add_argument("--k3", type=float)
    common.add_argument("--phi-perp", type=float, dest="phi_perp")
    common.add_argument("--phip-perp", type=float, dest="phip_perp")
    common.add_argument("--phi-k", type=float, dest="phi_k")
    common.add_argument("--theta-k", type=float, dest="theta_k", default=NORMAL_INCIDENCE)
    common.add_argument("--pol", choices=[p.value for p in Polarization], default="s")
    common.add_argument("--out", dest="output_path")
    common.add_argument("--format", choices=["csv", "json"])
    common.add_argument("--seed", type=lambda text: int(text, 0))
    common.add_argument("--jobs", type=int)
    common.add_argument("--oracle", choices=["tierA", "tierB"])
    common.add_argument("--mmax", type=int, dest="m_max")
    common.add_argument("--log-level", dest="log_level")
    return common


def build_parser() -> argparse.ArgumentParser:
    common = _common_parser()
    parser = argparse.ArgumentParser(prog="abpair", description="Scalar pair production on an Aharonov-Bohm flux line")
    sub = parser.add_subparsers(dest="command", required=True)

    sub.add_parser("amplitude", parents=[common], help="closed-form amplitude at one point")

    xsec = sub.add_parser("xsec", parents=[common], help="differential cross section sweep")
    xsec.add_argument("--axis", choices=SWEEP_PARAMS, required=True)
    xsec.add_argument("--start", type=float, required=True)
    xsec.add_argument("--stop", type=float, required=True)
    xsec.add_argument("--steps", type=int, required=True)
    xsec.add_argument("--gnuplot-script", action="store_true", help="write a gnuplot script next to the CSV")

    verify = sub.add_parser("verify", parents=[common], help="run the identity suite")
    verify.add_argument("--tolerance", type=float, help="override every identity tolerance")

    limits = sub.add_parser("limits", parents=[common], help="full result against its NR / UR limit")
    limits.add_argument("--regime", choices=["nr", "ur"], required=True)
    return parser


def config_from_args(args: argparse.Namespace) -> RunConfig:
    flux_f = args.flux_f if args.delta is None else args.delta
    overrides = {
        "mass": args.mass,
        "alpha": args.alpha,
        "flux_f": flux_f,
        "seed": args.seed,
        "output_path": args.output_path,
        "format": args.format,
        "jobs": args.jobs,
        "m_max": args.m_max,
        "oracle": args.oracle,
        "log_level": args.log_level,
    }
    return load_run_config(args.config, overrides)


def _point(args: argparse.Namespace, name: str) -> float:
    value = getattr(args, name)
    return DEFAULT_POINT[name] if value is None else value


# ============ Commands ============

def _relative_residual(diff: float, scale: float) -> float:
    return diff / scale if scale > 0 else diff


def cmd_amplitude(config: RunConfig, args: argparse.Namespace) -> int:
    """Closed-form amplitude, structure functions and, optionally, the oracle residual."""
    flux = decompose_flux(config.flux_f)
    photon = PhotonIn(
        kappa=_point(args, "kappa"), theta_k=args.theta_k,
        phi_k=_point(args, "phi_k"), polarization=args.pol,
    )
    pair = solve_pair(
        photon.kappa, _point(args, "k_perp"), _point(args, "k3"), config.mass,
        phi_perp=_point(args, "phi_perp"), phip_perp=_point(args, "phip_perp"),
    )
    amplitude = closed_form_amplitude(flux, photon, pair)
    sp = params_for(photon, pair)
    density = polarization_density(sp, pair, flux)
    projected = projected_density(amplitude, photon, pair)

    record: Dict[str, Any] = {
        "kappa": photon.kappa, "k_perp": pair.k_perp, "k3": pair.k3,
        "kp_perp": pair.kp_perp, "kp3": pair.kp3,
        "phi_perp": pair.phi_perp, "phip_perp": pair.phip_perp, "phi_k": photon.phi_k,
        "f": flux.f, "delta": flux.delta,
    }
    for name, value in (("d1", amplitude.d1), ("d2", amplitude.d2), ("dz", amplitude.dz)):
        record[f"{name}_re"], record[f"{name}_im"] = value.real, value.imag
    record.update({"a": sp.a, "b": sp.b, "D": sp.D, "A": sp.A, "B": sp.B, "B_printed": sp.B_printed})
    record.update({
        "sigma_plus_re": sp.sigma_plus.real, "sigma_plus_im": sp.sigma_plus.imag,
        "sigma_minus_re": sp.sigma_minus.real, "sigma_minus_im": sp.sigma_minus.imag,
        "lambda_s": density.lambda_s, "lambda_p": density.lambda_p,
        "projected_lambda_s": projected.lambda_s, "projected_lambda_p": projected.lambda_p,
    })

    if config.oracle:
        result = oracle_amplitude(
            flux, photon, pair, m_max=config.m_max, tier=config.oracle, cfg=config.tolerances,
        )
        diff = (amplitude - result.amplitude).norm()
        record.update({
            "oracle": result.tier.value,
            "m_max": result.m_max,
            "truncation_bound": result.truncation_bound,
            "oracle_residual": _relative_residual(diff, amplitude.norm()),
        })
        if result.identity_gap is not None:
            gap = result.identity_gap
            record["gap_integrals"] = result.gap_integrals
            for name, value in (("d1", gap.d1), ("d2", gap.d2), ("dz", gap.dz)):
                record[f"identity_gap_{name}_re"], record[f"identity_gap_{name}_im"] = value.real, value.imag
            record["identity_gap_relative"] = _relative_residual(gap.norm(), amplitude.norm())

    write_text(render([record], list(record), config.format), config.output_path)
    return 0


def cmd_xsec_sweep(config: RunConfig, args: argparse.Namespace) -> int:
    """One row per grid point; rejected points are emitted with a reason."""
    fixed = {name: _point(args, name) for name in ("kappa", "k_perp", "k3", "phi_perp", "phip_perp")}
    fixed["delta"] = decompose_flux(config.flux_f).delta
    fixed.pop(args.axis)
    try:
        spec = SweepSpec(
            axis=args.axis, start=args.start, stop=args.stop, steps=args.steps,
            fixed=fixed, phi_k=_point(args, "phi_k"),
        )
    except ValidationError as exc:
        raise ConfigError(f"invalid sweep: {exc}") from exc

    if args.gnuplot_script and (not config.output_path or config.format != "csv"):
        raise ConfigError("--gnuplot-script needs --out with csv format")

    polarization = Polarization(args.pol)
    rows = run_sweep(spec, config, polarization)
    meta = {"axis": spec.axis, "polarization": polarization.value, "mass": config.mass, "alpha": config.alpha}
    write_text(render(sweep_records(rows), SWEEP_COLUMNS, config.format, meta), config.output_path)

    if args.gnuplot_script:
        write_text(gnuplot_script(config.output_path, spec.axis, polarization.value), gnuplot_path(config.output_path))

    skipped = sum(1 for row in rows if row.skipped)
    if skipped:
        logger.warning("%d of %d sweep points skipped", skipped, len(rows))
    return 0


def cmd_verify(config: RunConfig, args: argparse.Namespace) -> int:
    """Run the five identity checks; exit 0 iff all pass."""
    reports = run_all(seed=config.seed, cfg=config.tolerances, tolerance=args.tolerance, jobs=config.jobs)
    print(format_table(reports))
    write_text(dumps_report(reports, config.seed), config.output_path or DEFAULT_REPORT)

    failing = [r.identity_name for r in reports if not r.passed]
    if failing:
        print(f"failing identities: {', '.join(failing)}", file=sys.stderr)
        return 1
    return 0


def _relative_deviation(full: float, limit: float) -> float:
    return abs(full - limit) / abs(limit) if limit else abs(full - limit)


def _nr_row(config: RunConfig, args: argparse.Namespace, kappa: float) -> Dict[str, Any]:
    M = config.mass
    p_avail = math.sqrt((kappa / 2.0) ** 2 - M ** 2)
    flux = decompose_flux(config.flux_f)
    phi_k = _point(args, "phi_k")
    photon = PhotonIn(kappa=kappa, phi_k=phi_k, polarization=args.pol)
    pair = solve_pair(
        kappa, NR_FRACTIONS[0] * p_avail, NR_FRACTIONS[1] * p_avail, M,
        phi_perp=_point(args, "phi_perp"), phip_perp=_point(args, "phip_perp"),
    )
    full = polarization_density(params_for(photon, pair), pair, flux)
    limit = nr_limit(flux, photon, pair, alpha=config.alpha)
    return {
        "kappa_over_2M_minus_1": kappa / (2.0 * M) - 1.0,
        "kappa": kappa, "k_perp": pair.k_perp, "k3": pair.k3, "kp_perp": pair.kp_perp,
        "lambda_s": full.lambda_s, "lambda_s_nr": limit.density.lambda_s,
        "deviation_s": _relative_deviation(full.lambda_s, limit.density.lambda_s),
        "lambda_p": full.lambda_p, "lambda_p_nr": limit.density.lambda_p,
        "deviation_p": _relative_deviation(full.lambda_p, limit.density.lambda_p),
        "d2_nr": abs(limit.amplitude.d2),
        "ratio_p_s": full.lambda_p / full.lambda_s if full.lambda_s else float("nan"),
        "ratio_p_s_nr": limit.density.lambda_p / limit.density.lambda_s if limit.density.lambda_s else float("nan"),
        "regime_factor": limit_regime_factor("nr", kappa, M),
    }


def _ur_row(config: RunConfig, args: argparse.Namespace, kappa: float) -> Dict[str, Any]:
    M = config.mass
    flux = decompose_flux(config.flux_f)
    phi = _point(args, "phi_k")
    photon = PhotonIn(kappa=kappa, phi_k=phi, polarization=args.pol)
    pair = solve_pair(kappa, UR_FRACTIONS[0] * kappa, UR_FRACTIONS[1] * kappa, M, phi_perp=phi, phip_perp=phi)
    sp = params_for(photon, pair)
    full = polarization_density(sp, pair, flux)
    limit = ur_limit(sp, flux, pair, alpha=config.alpha)
    return {
        "kappa_over_M": kappa / M,
        "kappa": kappa, "k_perp": pair.k_perp, "k3": pair.k3, "kp_perp": pair.kp_perp,
        "a": sp.a, "b": sp.b,
        "sigma_ratio": abs(sp.sigma_minus / sp.sigma_plus), "a_over_b": limit.a_over_b,
        "lambda_s": full.lambda_s, "lambda_s_ur": limit.density.lambda_s,
        "deviation_s": _relative_deviation(full.lambda_s, limit.density.lambda_s),
        "lambda_p": full.lambda_p, "lambda_p_ur": limit.density.lambda_p,
        "deviation_p": _relative_deviation(full.lambda_p, limit.density.lambda_p),
        "regime_factor": limit_regime_factor("ur", kappa, M),
    }


def cmd_limits(config: RunConfig, args: argparse.Namespace) -> int:
    """Side-by-side full and limiting densities over an extrapolation schedule."""
    M = config.mass
    if args.regime == "nr":
        kappas = [args.kappa] if args.kappa is not None else [2.0 * M * (1.0 + eps) for eps in NR_OFFSETS]
        rows = [_nr_row(config, args, kappa) for kappa in kappas]
    else:
        kappas = [args.kappa] if args.kappa is not None else [k * M for k in UR_KAPPAS]
        rows = [_ur_row(config, args, kappa) for kappa in kappas]

    meta = {"regime": args.regime, "polarization": args.pol, "mass": M}
    write_text(render(rows, list(rows[0]), config.format, meta), config.output_path)
    return 0


COMMANDS: Dict[str, Callable[[RunConfig, argparse.Namespace], int]] = {
    "amplitude": cmd_amplitude,
    "xsec": cmd_xsec_sweep,
    "verify": cmd_verify,
    "limits": cmd_limits,
}


# ============ Entry point ============

def main(argv: Optional[List[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        config = config_from_args(args)
        configure_logging(config.log_level)
        return COMMANDS[args.command](config, args)
    except ABPairError as exc:
        logger.debug("command failed", exc_info=True)
        print(f"error: {exc}", file=sys.stderr)
        return exc.exit_code
    except ValidationError as exc:
        print(f"error: invalid input: {exc}", file=sys.stderr)
        return 2
    except Exception:
        logger.exception("internal failure")
        return 1
