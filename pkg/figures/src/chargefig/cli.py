"""Figure CLI: ``chargefig plot <figure-id> --csv <path> --out <path>``."""

from __future__ import annotations

import argparse
import sys

from .figures import FIGURE_IDS, FigureSpec, FilterError, render
from .schema import SchemaError


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="chargefig", description="Render figures from chargesim sweep CSVs"
    )
    sub = parser.add_subparsers(dest="command", required=True)
    p = sub.add_parser("plot", help="render one figure (PNG + SVG)")
    p.add_argument("figure_id", choices=FIGURE_IDS)
    p.add_argument("--csv", required=True)
    p.add_argument("--out", required=True,
                   help="output stem or file name; both .png and .svg are written")
    p.add_argument("--model", default=None, choices=["harmonic", "spin", "dicke"])
    p.add_argument("--side", default=None, choices=["quantum", "classical"])
    p.add_argument("--g", type=float, default=None)
    p.add_argument("--N", type=int, default=None, dest="n_units")
    p.add_argument("--ref-slope", default=None, choices=["0.5", "1", "none"])
    scale = p.add_mutually_exclusive_group()
    scale.add_argument("--loglog", dest="loglog", action="store_true", default=None)
    scale.add_argument("--no-loglog", dest="loglog", action="store_false")
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    ref = None
    if args.ref_slope not in (None, "none"):
        ref = float(args.ref_slope)
    try:
        spec = FigureSpec(
            csv_path=args.csv,
            figure_id=args.figure_id,
            out_path=args.out,
            model=args.model,
            side=args.side,
            g=args.g,
            n_units=args.n_units,
            loglog=args.loglog,
            ref_slope=ref,
        )
        paths = render(spec)
    except (SchemaError, FilterError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    for path in paths:
        print(f"wrote {path}")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
