"""Entry point: figures <panel> <csv> <out>."""

from __future__ import annotations

import argparse
import sys
from pathlib import Path
from typing import Sequence

from .render import PANELS, FigureSpec, SchemaError, render


def main(argv: Sequence[str] | None = None) -> int:
    parser = argparse.ArgumentParser(
        prog="figures",
        description="Render a ratingdyn CSV dataset into a figure panel.",
    )
    parser.add_argument("panel", choices=PANELS)
    parser.add_argument("csv", type=Path, help="dataset produced by the ratingdyn CLI")
    parser.add_argument("out", type=Path, help="output image (.svg/.pdf vector, .png raster)")
    args = parser.parse_args(argv)

    try:
        path = render(FigureSpec(dataset=args.csv, panel=args.panel, output=args.out))
    except (SchemaError, FileNotFoundError) as exc:
        print(f"figures: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"figures: cannot write output: {exc}", file=sys.stderr)
        return 4
    print(path)
    return 0


if __name__ == "__main__":
    sys.exit(main())
