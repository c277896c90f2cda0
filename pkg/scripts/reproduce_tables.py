"""Reproduce the RMSE tables (1-3) and the fixed-point MSE tables (4-7).

Reduced scale by default (n=2000, 40 replications, n sweep 500/1000/2000);
``--full-scale`` uses n=5000 with 250 replications and the full sweep.
Writes one CSV/JSON pair per table into ``--out``.

    python scripts/reproduce_tables.py --out results/
    python scripts/reproduce_tables.py --tables table1-row1 table3 --full-scale
"""

import argparse
import sys
from pathlib import Path

from vbkreg.cli import main as cli_main
from vbkreg.simulate import BUILTIN_SCENARIOS


def main(argv=None) -> int:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--out", type=Path, default=Path("results"))
    ap.add_argument("--tables", nargs="*", default=sorted(BUILTIN_SCENARIOS))
    ap.add_argument("--seed", type=int)
    ap.add_argument("--full-scale", action="store_true")
    args = ap.parse_args(argv)
    status = 0
    for name in args.tables:
        sub = "mse-points" if "points" in BUILTIN_SCENARIOS.get(name, {}) else "simulate"
        cmd = [sub, name, "-o", str(args.out / name)]
        if args.seed is not None:
            cmd += ["--seed", str(args.seed)]
        if args.full_scale:
            cmd.append("--full-scale")
        status |= cli_main(cmd)
        print()
    return status


if __name__ == "__main__":
    sys.exit(main())
