"""Reader for levy3d sweep CSVs.

This package talks to the simulator only through its documented CSV schema;
files with any other header are refused.
"""

from __future__ import annotations

CSV_COLUMNS = [
    "scenario", "mu", "n", "shape", "p1", "p2", "d",
    "delta_B", "delta_P", "elong", "V",
    "trials", "truncated_frac",
    "mean_time", "sem_time", "mean_steps", "sem_steps",
    "universal_lb", "cauchy_ub", "regime_lb", "overhead",
]

_STR_COLS = {"scenario", "shape"}
_INT_COLS = {"trials"}


class SchemaError(ValueError):
    """The CSV header does not match the documented sweep schema."""


class MissingBaselineError(ValueError):
    """A normalized figure family needs a mu = 2 cell that is absent."""


def _parse(col, text):
    if col in _STR_COLS:
        return text
    if col in _INT_COLS:
        return int(text)
    if text == "":
        return None
    return float(text)


def read_records(path) -> list[dict]:
    """Rows of a sweep CSV as dicts; ``#`` comment lines are ignored."""
    with open(path) as fh:
        lines = [ln.rstrip("\n") for ln in fh if ln.strip()]
    body = [ln for ln in lines if not ln.startswith("#")]
    if not body or body[0].split(",") != CSV_COLUMNS:
        raise SchemaError(f"{path}: header does not match the sweep schema")
    rows = []
    for ln in body[1:]:
        cells = ln.split(",")
        if len(cells) != len(CSV_COLUMNS):
            raise SchemaError(f"{path}: malformed row {ln!r}")
        rows.append({c: _parse(c, v) for c, v in zip(CSV_COLUMNS, cells)})
    return rows


def read_many(paths) -> list[dict]:
    rows = []
    for p in paths:
        rows.extend(read_records(p))
    return rows
