"""
Command-line interface: amplitude, xsec, verify and limits subcommands.
"""

from .main import COMMANDS, build_parser, main
from .sweep import SweepRow, SweepSpec, run_sweep

__all__ = ["COMMANDS", "build_parser", "main", "SweepRow", "SweepSpec", "run_sweep"]
