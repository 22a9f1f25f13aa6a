"""CLI: gmfigures render --kind <k> --in <csv> --out <svg>."""

import argparse
import sys

from .render import KINDS, FigureJob, SchemaError, render


def main(argv=None):
    parser = argparse.ArgumentParser(prog="gmfigures")
    sub = parser.add_subparsers(dest="command", required=True)
    p = sub.add_parser("render", help="render one CSV artifact to SVG")
    p.add_argument("--kind", required=True, choices=list(KINDS))
    p.add_argument("--in", dest="input_csv", required=True)
    p.add_argument("--out", dest="output_image", required=True)
    args = parser.parse_args(argv)

    job = FigureJob(kind=args.kind, input_csv=args.input_csv, output_image=args.output_image)
    try:
        path = render(job)
    except SchemaError as exc:
        print(f"schema error: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"i/o error: {exc}", file=sys.stderr)
        return 3
    print(path)
    return 0


if __name__ == "__main__":
    sys.exit(main())
