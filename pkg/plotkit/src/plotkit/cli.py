"""`plot <kind> --in CSV --out DIR`: render simulator CSVs to images."""

from __future__ import annotations

import argparse
import sys

from .figures import RENDERERS, FigureSpec, PlotError


def main(argv: list[str] | None = None) -> int:
    parser = argparse.ArgumentParser(prog="plot", description="Render ltcds CSV outputs")
    parser.add_argument("kind", choices=sorted(RENDERERS))
    parser.add_argument(
        "--in", dest="inputs", action="append", required=True, help="input CSV (repeatable)"
    )
    parser.add_argument("--out", required=True, help="output directory")
    parser.add_argument("--group-by", default="", help="comma-separated grouping columns")
    parser.add_argument("--format", dest="image_format", choices=("svg", "png"), default="svg")
    args = parser.parse_args(argv)

    spec = FigureSpec(
        inputs=args.inputs,
        kind=args.kind,
        out_dir=args.out,
        group_by=[c.strip() for c in args.group_by.split(",") if c.strip()],
        image_format=args.image_format,
    )
    try:
        outputs = RENDERERS[args.kind](spec)
    except (PlotError, FileNotFoundError) as exc:
        print(f"plot: {exc}", file=sys.stderr)
        return 2
    for path in outputs:
        print(path)
    return 0


if __name__ == "__main__":
    sys.exit(main())
