"""Write the discrimination, divergence and metric curves as CSV files.

    python3 scripts/curves.py --out figures --steps 200
"""

import argparse
from pathlib import Path

from qif.sweep import KINDS, SweepConfig, to_csv


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--out", type=Path, default=Path("figures"))
    ap.add_argument("--steps", type=int, default=200)
    args = ap.parse_args()
    args.out.mkdir(parents=True, exist_ok=True)
    for kind in KINDS:
        path = args.out / f"{kind}.csv"
        path.write_text(to_csv(SweepConfig(kind, args.steps)))
        print(path)


if __name__ == "__main__":
    main()
