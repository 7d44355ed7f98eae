"""figures <kind> --in data.csv [--in more.csv] --out figure.png
                  [--exponents z=1.51,nu=1.1,pc=0.081]"""
from __future__ import annotations

import argparse
import sys

from .plots import KINDS, PlotSpec, render

_EXPONENT_ALIASES = {"pc": "p_c"}


def parse_exponents(text: str) -> dict:
    out = {}
    for part in text.split(","):
        part = part.strip()
        if not part:
            continue
        key, _, val = part.partition("=")
        key = key.strip()
        out[_EXPONENT_ALIASES.get(key, key)] = float(val)
    return out


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="figures", description=__doc__)
    parser.add_argument("kind", choices=KINDS)
    parser.add_argument("--in", dest="inputs", action="append", required=True,
                        help="input CSV (repeatable)")
    parser.add_argument("--out", required=True, help="output image path")
    parser.add_argument("--exponents", default="",
                        help="comma-separated name=value pairs, e.g. z=1.51,nu=1.1,pc=0.081")
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        spec = PlotSpec(
            inputs=args.inputs,
            kind=args.kind,
            out=args.out,
            exponents=parse_exponents(args.exponents),
        )
        objective = render(spec)
    except (OSError, ValueError) as exc:
        print(f"figures: error: {exc}", file=sys.stderr)
        return 1
    if objective is not None:
        print(f"collapse objective = {objective!r}")
    print(f"wrote {args.out}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
