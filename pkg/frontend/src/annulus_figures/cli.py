"""Figure rendering entry point: ``plot <kind> --in csv [--in csv2] --out img``."""
from __future__ import annotations

import argparse
import sys

from .csv_io import SchemaError
from .render import FIGURE_KINDS, FigureSpec, render


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="plot", description="Render figures from annulus CSV outputs"
    )
    parser.add_argument("kind", choices=FIGURE_KINDS)
    parser.add_argument("--in", dest="inputs", action="append", required=True,
                        help="input CSV (repeat for kinds taking two inputs)")
    parser.add_argument("--out", required=True, help="output image path")
    parser.add_argument("--format", choices=("png", "svg"),
                        help="default: from the output extension")
    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    fmt = args.format or ("svg" if args.out.endswith(".svg") else "png")
    try:
        spec = FigureSpec(
            kind=args.kind,
            inputs=tuple(args.inputs),
            output=args.out,
            format=fmt,
        )
        path = render(spec)
    except (SchemaError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    print(f"wrote {path}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
