"""Write the weaving diagrams for one or more genera as SVG files."""

import argparse
from pathlib import Path

from weaving import pipeline, render


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("genera", type=int, nargs="*", default=[3, 5])
    ap.add_argument("--out", default="figures")
    ap.add_argument("--transform", choices=(render.FIGURE, render.RAW), default=render.FIGURE)
    args = ap.parse_args()

    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    for g in args.genera:
        log = pipeline.run(g).log
        for stage in ("all", *render.PANEL_ORDER):
            svg = render.render(log, g, stage, transform=args.transform)
            path = out / f"g{g}-{stage}.svg"
            path.write_bytes(svg)
            print(f"{path}: {render.crossing_total(svg)} crossings")


if __name__ == "__main__":
    main()
