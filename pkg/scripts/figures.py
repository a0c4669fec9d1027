"""Discrete-moment figures at desk scale through the command line tool.

Computes (or reuses) a zero cache, writes comparison CSVs for zeta'(rho) and
zeta'(rho)^2, and renders each with the plot script that `compare` emits.

    python3 scripts/figures.py [--count 10000] [--outdir figures]
"""

import argparse
import os
import subprocess
import sys
from pathlib import Path

from zetamoments import cli


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--count", type=int, default=10_000)
    ap.add_argument("--outdir", type=Path, default=Path("figures"))
    args = ap.parse_args()
    args.outdir.mkdir(parents=True, exist_ok=True)
    cache = args.outdir / "zeta-zeros.txt"

    code = cli.main(["zeros", "--count", str(args.count), "--cache", str(cache)])
    if code:
        sys.exit(code)
    for name, orders in [("shanks", "1"), ("second_moment", "1,1")]:
        csv = args.outdir / f"{name}.csv"
        code = cli.main(["compare", "--orders", orders, "--cache", str(cache), "--count", str(args.count), "--stride", "1", "--out", str(csv)])
        if code:
            sys.exit(code)
        env = dict(os.environ, MPLBACKEND="Agg")
        subprocess.run([sys.executable, f"{name}_plot.py"], cwd=args.outdir, check=True, env=env)
        print(f"wrote {args.outdir / (name + '.png')}")


if __name__ == "__main__":
    main()
