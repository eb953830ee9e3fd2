"""Command-line entry point: figplots --figure N --csv PATH --out PATH."""

import argparse
import sys

from figplots.recipes import RECIPES, FigureError, render


def build_parser():
    parser = argparse.ArgumentParser(
        prog="figplots",
        description="Render a standard figure from geonresp sweep CSVs.",
    )
    parser.add_argument("--figure", type=int, required=True,
                        choices=sorted(RECIPES),
                        help="figure number to render")
    parser.add_argument("--csv", action="append", required=True,
                        metavar="PATH",
                        help="input CSV (repeat to concatenate files)")
    parser.add_argument("--out", required=True, metavar="PATH",
                        help="output image path (.png, .pdf, or .svg)")
    return parser


def main(argv=None):
    args = build_parser().parse_args(argv)
    try:
        render(args.figure, args.csv, args.out)
    except (FigureError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    print(args.out)
    return 0


if __name__ == "__main__":
    sys.exit(main())
