"""
Report Emission Module

Deterministic rendering of subcommand results as JSON, CSV or plain text.
Floats are written with repr() so every value round-trips exactly; JSON keys
are sorted so identical inputs give byte-identical output.
"""

import json
import math
import sys
from pathlib import Path
from typing import Any, Literal

import numpy as np
import pandas as pd
from pydantic import BaseModel, Field

from ..utils.logging_config import get_logger

logger = get_logger("data.reports")

OutputFormat = Literal["text", "json", "csv"]

# Discrepancies between published formulas and what is computed
DISCREPANCY_NOTES: dict[str, str] = {
    "cyclical_closed_form": (
        "The published closed form of the cyclical balance carries a stray '- C'; "
        "the cyclical balance is reported as the residual SBC - SBS."
    ),
    "gradient_chain_rule": (
        "The published gradient system mixes an inverse time derivative with a "
        "3K*^2 / 3b^2 multiplier; direct partial derivatives of Vol are authoritative."
    ),
    "logistic_coefficients": (
        "The published closed form for B(2014) = 172055.3 has corrupted coefficients; "
        "the trajectory is solved from dB/dt = B(1 - B) and the initial condition."
    ),
    "second_derivative_expression": (
        "The published second-derivative condition repeats K' where K'' belongs; "
        "the corrected expression is evaluated."
    ),
    "second_differential_origin": (
        "The second differential is claimed positive at the stationary origin, "
        "but the Hessian of Vol vanishes there; the computed sign is reported."
    ),
}


class Report(BaseModel):
    """Machine-readable report of one subcommand run."""

    subcommand: str
    inputs: list[dict[str, Any]] = Field(default_factory=list)
    results: list[dict[str, Any]] = Field(default_factory=list)
    warnings: list[dict[str, str]] = Field(default_factory=list)
    summary: dict[str, Any] | None = None

    def warn(self, code: str) -> None:
        """Attach a discrepancy note once; the computing code logs it."""
        if any(w["code"] == code for w in self.warnings):
            return
        self.warnings.append({"code": code, "message": DISCREPANCY_NOTES[code]})


def _plain(value: Any) -> Any:
    """Convert numpy scalars/arrays and tuples into JSON-native values."""
    if isinstance(value, dict):
        return {str(k): _plain(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_plain(v) for v in value]
    if isinstance(value, np.ndarray):
        return [_plain(v) for v in value.tolist()]
    if isinstance(value, np.bool_):
        return bool(value)
    if isinstance(value, np.integer):
        return int(value)
    if isinstance(value, np.floating):
        return float(value)
    return value


def _cell(value: Any) -> Any:
    if isinstance(value, (list, dict)):
        return json.dumps(value, sort_keys=True)
    if isinstance(value, float):
        return repr(value) if math.isfinite(value) else str(value)
    if isinstance(value, bool):
        return "true" if value else "false"
    if value is None:
        return ""
    return value


def render_json(report: Report) -> str:
    payload = _plain(report.model_dump(exclude={"summary"} if report.summary is None else None))
    return json.dumps(payload, indent=2, sort_keys=True, ensure_ascii=False) + "\n"


def render_csv(rows: list[dict[str, Any]]) -> str:
    """Rows as CSV; column order follows the first row, floats written with repr()."""
    if not rows:
        return ""
    rows = [_plain(row) for row in rows]
    columns = list(rows[0].keys())
    for row in rows[1:]:
        columns.extend(key for key in row if key not in columns)

    frame = pd.DataFrame(
        [{column: _cell(row.get(column)) for column in columns} for row in rows],
        columns=columns,
    )
    return frame.to_csv(index=False, lineterminator="\n")


def render_text(report: Report) -> str:
    """
    Human-readable rendering.

    A single result row with a `value` entry prints just that value; other
    results print as a fixed-width table followed by `key: value` summary
    lines. Warnings go to the log, not to the report text.
    """
    results = [_plain(row) for row in report.results]
    if len(results) == 1 and "value" in results[0] and report.summary is None:
        return f"{_cell(results[0]['value'])}\n"

    lines: list[str] = []
    if results:
        frame = pd.DataFrame(
            [
                {key: (json.dumps(v) if isinstance(v, (list, dict)) else v) for key, v in row.items()}
                for row in results
            ]
        )
        lines.append(frame.to_string(index=False, float_format=lambda v: f"{v:.10g}"))

    for key, value in sorted((report.summary or {}).items()):
        value = _plain(value)
        text = json.dumps(value, sort_keys=True) if isinstance(value, (list, dict)) else _cell(value)
        lines.append(f"{key}: {text}")

    return "\n".join(lines) + "\n" if lines else ""


def render(report: Report, fmt: OutputFormat) -> str:
    if fmt == "json":
        return render_json(report)
    if fmt == "csv":
        return render_csv(report.results)
    return render_text(report)


def write_output(text: str, out_path: str | Path | None = None) -> None:
    """Write rendered text to a file, or to standard output when no path is given."""
    if out_path is None:
        sys.stdout.write(text)
        sys.stdout.flush()
        return

    path = Path(out_path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(text, encoding="utf-8")
    logger.info(f"Report written to {path}")


def write_plot_data(rows: list[dict[str, float]], path: str | Path) -> None:
    """CSV with columns t, B, K, E for plotting an effectiveness path."""
    write_output(render_csv([{key: row[key] for key in ("t", "B", "K", "E")} for row in rows]), path)
