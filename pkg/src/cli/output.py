"""
Table output: versioned CSV, JSON and gnuplot scripts.
"""

import csv
import io
import json
from enum import Enum
from pathlib import Path
from typing import Any, Dict, List, Optional, Sequence

import numpy as np

from ..logging_config import get_logger
from .sweep import SWEEP_PARAMS, SweepRow

logger = get_logger(__name__)

CSV_SCHEMA = 1
UNITS_NOTE = "units: natural (hbar = c = 1); momenta and energies in units of the pair mass M"
SWEEP_COLUMNS = ["index", *SWEEP_PARAMS, "lambda_s", "lambda_p", "dsigma", "reason"]


class ResultEncoder(json.JSONEncoder):
    """Handle complex, numpy and enum values."""

    def default(self, obj):
        if isinstance(obj, complex):
            return {"re": obj.real, "im": obj.imag}
        if isinstance(obj, np.generic):
            return obj.item()
        if isinstance(obj, np.ndarray):
            return obj.tolist()
        if isinstance(obj, Enum):
            return obj.value
        return super().default(obj)


def _cell(value: Any) -> str:
    if value is None:
        return ""
    if isinstance(value, float):
        return repr(value)
    return str(value)


def render_csv(rows: Sequence[Dict[str, Any]], columns: Sequence[str], meta: Optional[Dict[str, Any]] = None) -> str:
    """CSV text led by '# schema=1' and comment lines for units and run metadata."""
    buffer = io.StringIO()
    buffer.write(f"# schema={CSV_SCHEMA}\n")
    buffer.write(f"# {UNITS_NOTE}\n")
    for key, value in (meta or {}).items():
        buffer.write(f"# {key}={value}\n")
    writer = csv.writer(buffer, lineterminator="\n")
    writer.writerow(columns)
    for row in rows:
        writer.writerow([_cell(row.get(column)) for column in columns])
    return buffer.getvalue()


def render_json(rows: Sequence[Dict[str, Any]], meta: Optional[Dict[str, Any]] = None) -> str:
    document = {"schema": CSV_SCHEMA, "units": UNITS_NOTE, "meta": meta or {}, "rows": list(rows)}
    return json.dumps(document, cls=ResultEncoder, indent=2, sort_keys=True)


def render(rows: Sequence[Dict[str, Any]], columns: Sequence[str], fmt: str, meta: Optional[Dict[str, Any]] = None) -> str:
    if fmt == "json":
        return render_json(rows, meta)
    return render_csv(rows, columns, meta)


def sweep_records(rows: Sequence[SweepRow]) -> List[Dict[str, Any]]:
    return [
        {
            "index": row.index,
            **row.params,
            "lambda_s": row.lambda_s,
            "lambda_p": row.lambda_p,
            "dsigma": row.dsigma,
            "reason": row.reason,
        }
        for row in rows
    ]


def write_text(text: str, path: str) -> None:
    """Write to `path`, or to standard output when it is empty."""
    if not path:
        print(text, end="" if text.endswith("\n") else "\n")
        return
    Path(path).write_text(text if text.endswith("\n") else text + "\n")
    logger.info("wrote %s", path)


def gnuplot_script(csv_path: str, axis: str, polarization: str) -> str:
    """Plain-text gnuplot script plotting dsigma against the swept axis."""
    x_col = SWEEP_COLUMNS.index(axis) + 1
    y_col = SWEEP_COLUMNS.index("dsigma") + 1
    return "\n".join([
        "set datafile separator ','",
        "set datafile commentschars '#'",
        "set key autotitle columnhead",
        f"set xlabel '{axis}'",
        f"set ylabel 'dsigma ({polarization})'",
        "set format y '%.2e'",
        f"plot '{csv_path}' using {x_col}:{y_col} with linespoints title 'dsigma_{polarization}'",
        "",
    ])


def gnuplot_path(csv_path: str) -> str:
    return str(Path(csv_path).with_suffix(".gp"))
