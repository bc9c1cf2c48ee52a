"""
Data Processing Module

This module turns library results into pandas tables: transform values,
inverted densities, bell-test orders, level-crossing counts and example
suite claims. The command line writes these tables as CSV or text; the
JSON outputs come from the reports' own to_dict methods.
"""

from typing import Dict, Optional, Sequence

import numpy as np
import pandas as pd

from .examples import SuiteReport, VERDICTS
from .numeric import BellTestReport
from .representation import LevelCrossingReport


def transform_frame(xi: Sequence[float], values: Sequence[complex]) -> pd.DataFrame:
    """
    Tabulate transform values.

    Parameters:
    -----------
    xi : Sequence[float]
        Frequencies
    values : Sequence[complex]
        F(i xi) at each frequency

    Returns:
    --------
    pd.DataFrame
        Columns (xi, re, im)
    """
    values = np.asarray(values, dtype=complex)
    return pd.DataFrame({"xi": np.asarray(xi, dtype=float), "re": values.real, "im": values.imag})


def density_frame(x: Sequence[float], values: Sequence[float]) -> pd.DataFrame:
    """Columns (x, value)."""
    return pd.DataFrame({"x": np.asarray(x, dtype=float), "value": np.asarray(values, dtype=float)})


def bell_test_frame(report: BellTestReport) -> pd.DataFrame:
    """
    One row per derivative order of a bell test.

    Notes:
    ------
    Crossing locations are kept out of the table; they are available in
    the JSON report.
    """
    rows = [
        {
            "n": o.n,
            "count": o.count,
            "expected": o.expected,
            "verdict": o.verdict,
            "grid_size": o.grid_size,
            "tolerance": o.tolerance,
            "min_abs_at_crossings": o.min_abs_at_crossings,
            "precise_points": o.precise_points,
        }
        for o in report.orders
    ]
    columns = ["n", "count", "expected", "verdict", "grid_size", "tolerance", "min_abs_at_crossings", "precise_points"]
    return pd.DataFrame(rows, columns=columns)


def level_crossing_frame(report: LevelCrossingReport) -> pd.DataFrame:
    rows = [{"k": k, "sign_changes": count, "ok": count <= 1} for k, count in sorted(report.counts.items())]
    return pd.DataFrame(rows, columns=["k", "sign_changes", "ok"])


def claims_frame(suite: SuiteReport) -> pd.DataFrame:
    """
    One row per claim of an example suite run.

    Expected and observed values are rendered as strings so that mixed
    types (counts, rationals, lists) share a column.
    """
    rows = []
    for case in suite.cases:
        for result in case.results:
            rows.append({
                "case": case.id,
                "kind": result.kind,
                "description": result.description,
                "expected": str(result.expected),
                "observed": "" if result.observed is None else str(result.observed),
                "verdict": result.verdict,
                "provenance": result.provenance,
                "seconds": round(result.seconds, 3),
            })
    columns = ["case", "kind", "description", "expected", "observed", "verdict", "provenance", "seconds"]
    return pd.DataFrame(rows, columns=columns)


def verdict_summary(suite: SuiteReport) -> pd.DataFrame:
    """Claims per case and verdict, cases in catalog order."""
    frame = claims_frame(suite)
    order = [case.id for case in suite.cases]
    if frame.empty:
        return pd.DataFrame(0, index=pd.Index(order, name="case"), columns=list(VERDICTS))
    table = pd.crosstab(frame["case"], frame["verdict"])
    return table.reindex(index=order, columns=list(VERDICTS), fill_value=0)


def format_frame(frame: pd.DataFrame, fmt: str = "csv", float_precision: Optional[int] = None) -> str:
    """
    Render a table as CSV or aligned text.

    Parameters:
    -----------
    frame : pd.DataFrame
        Table to render
    fmt : str, default="csv"
        "csv" or "text"
    float_precision : int, optional
        Significant digits of floats; full repr precision when None
    """
    float_format = f"%.{float_precision}g" if float_precision else None
    if fmt == "csv":
        return frame.to_csv(index=False, float_format=float_format, lineterminator="\n")
    if fmt == "text":
        formatters: Dict = {}
        if float_precision:
            formatters = {c: (lambda v: f"{v:.{float_precision}g}") for c in frame.select_dtypes("float").columns}
        return frame.to_string(index=False, formatters=formatters) + "\n"
    raise ValueError(f"Unknown table format {fmt!r}")
