"""Figure rendering for levy3d sweep CSVs (consumes only the CSV contract)."""

from .reader import CSV_COLUMNS, MissingBaselineError, SchemaError, read_records
from .render import FAMILIES, FigureSpec, build_figure, render

__version__ = "0.1.0"
