"""Series CSV files and JSON test reports.

Series files store one time point per row and one series per column; the
in-memory panel is the transpose (``p x T``).
"""

from __future__ import annotations

import csv
import json
import math
from pathlib import Path

import numpy as np

from hdwhite.exceptions import SeriesFileError

__all__ = ["read_series_csv", "write_series_csv", "format_series_csv", "report_payload",
           "write_report", "read_report"]


def read_series_csv(path, has_header: bool = False) -> np.ndarray:
    """Read a comma-separated series file into a ``p x T`` array.

    Ragged rows, unparsable or non-finite cells and empty files raise
    :class:`SeriesFileError` carrying the 1-based file row/column.
    """
    path = Path(path)
    with path.open(newline="") as fh:
        rows = list(csv.reader(fh))
    first_data = 1
    if has_header and rows:
        rows = rows[1:]
        first_data = 2
    # tolerate a trailing blank line
    while rows and not any(cell.strip() for cell in rows[-1]):
        rows.pop()
    if not rows:
        raise SeriesFileError(f"{path}: no data rows")
    width = len(rows[0])
    values = np.empty((len(rows), width))
    for r, row in enumerate(rows):
        lineno = r + first_data
        if len(row) != width:
            raise SeriesFileError(f"{path}: expected {width} columns, found {len(row)}", row=lineno)
        for c, cell in enumerate(row):
            try:
                v = float(cell)
            except ValueError:
                raise SeriesFileError(f"{path}: cannot parse {cell!r} as a number",
                                      row=lineno, column=c + 1) from None
            if not math.isfinite(v):
                raise SeriesFileError(f"{path}: non-finite value {cell!r}", row=lineno, column=c + 1)
            values[r, c] = v
    return values.T.copy()


def format_series_csv(x, header: bool = False) -> str:
    x = np.asarray(x, dtype=float)
    lines = []
    if header:
        lines.append(",".join(f"s{i + 1}" for i in range(x.shape[0])))
    for col in x.T:
        lines.append(",".join(format(float(v), ".17g") for v in col))
    return "\n".join(lines) + "\n"


def write_series_csv(x, path, header: bool = False) -> None:
    Path(path).write_text(format_series_csv(x, header=header))


def report_payload(report, input_description: str, wall_time: float) -> dict:
    from hdwhite import __version__

    body = report.to_dict()
    return {
        "input": input_description,
        "config": body["config"],
        "p": body["p"],
        "T": body["T"],
        "standardizer": body["standardizer"],
        "orders": body["orders"],
        "adaptive": body["adaptive"],
        "software": {"package": "hdwhite", "version": __version__},
        "wall_time_seconds": wall_time,
    }


def write_report(payload: dict, path) -> None:
    # json writes floats with repr, the shortest string that round-trips exactly
    Path(path).write_text(json.dumps(payload, indent=2, allow_nan=False) + "\n")


def read_report(path) -> dict:
    return json.loads(Path(path).read_text())
