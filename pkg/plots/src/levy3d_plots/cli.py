"""The ``render`` command: sweep CSVs in, publication figures out.

    render --csv sweep.csv --family ratio-vs-mu --out figure.png

Exit codes: 0 success, 2 usage or schema error.
"""

from __future__ import annotations

import argparse
import sys

from .reader import MissingBaselineError, SchemaError
from .render import FAMILIES, FigureSpec, render


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(prog="render", description=__doc__)
    parser.add_argument("--csv", action="append", required=True,
                        help="input sweep CSV (repeatable)")
    parser.add_argument("--family", required=True, choices=FAMILIES)
    parser.add_argument("--out", required=True, help="output image path (.png or .svg)")
    parser.add_argument("--linear-x", action="store_true", help="linear x axis")
    parser.add_argument("--linear-y", action="store_true", help="linear y axis")
    args = parser.parse_args(argv)
    try:
        spec = FigureSpec(csv_paths=tuple(args.csv), family=args.family,
                          out=args.out, log_x=not args.linear_x,
                          log_y=not args.linear_y)
        render(spec)
    except (SchemaError, MissingBaselineError, OSError, ValueError) as exc:
        sys.stderr.write(f"error: {exc}\n")
        return 2
    return 0


if __name__ == "__main__":
    sys.exit(main())
