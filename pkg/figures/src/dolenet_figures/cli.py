"""Command line: render figures from a run directory of aggregated CSVs."""

from __future__ import annotations

import argparse
import sys

from .reader import DataError
from .render import FIGURES, render


def main(argv: list[str] | None = None) -> int:
    parser = argparse.ArgumentParser(
        prog="dolenet-figures",
        description="Render panel figures from aggregated scenario CSVs")
    parser.add_argument("--in", dest="in_dir", required=True,
                        help="run directory with <scenario>/aggregated.csv")
    parser.add_argument("--out", dest="out_dir", required=True)
    parser.add_argument("--fig", action="append", choices=sorted(FIGURES),
                        help="render only this figure (repeatable)")
    parser.add_argument("--column", default="trend",
                        choices=["trend", "mean"],
                        help="which aggregated column to plot")
    args = parser.parse_args(argv)
    try:
        written = render(args.in_dir, args.out_dir, args.fig, args.column)
    except (DataError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    for path in written:
        print(path)
    return 0


if __name__ == "__main__":
    sys.exit(main())
