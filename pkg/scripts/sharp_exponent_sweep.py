#!/usr/bin/env python3
"""Sweep the counterexample family and fit the stability exponent.

Writes gnuplot-compatible two-column data (epsilon, aligned L1 distance)
plus the fitted slope, and prints a short table.

  python3 scripts/sharp_exponent_sweep.py --t 0.5 --n 4096 --out sweep.dat
"""

import argparse
import math
import sys

import numpy as np

from plstab import CounterexampleConfig, counterexample_family, exponent_fit


def main() -> int:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--t", type=float, default=0.5)
    ap.add_argument("--n", type=int, default=4096)
    ap.add_argument("--points", type=int, default=12)
    ap.add_argument("--delta-min", type=float, default=0.002)
    ap.add_argument("--delta-max", type=float, default=0.1)
    ap.add_argument("--out", default=None)
    args = ap.parse_args()

    deltas = np.exp(np.linspace(math.log(args.delta_min), math.log(args.delta_max), args.points))
    pts = []
    print(f"# delta  epsilon  distance  distance/sqrt(eps/tau)")
    tau = min(args.t, 1.0 - args.t)
    for d in deltas:
        res = counterexample_family(CounterexampleConfig(delta=float(d), t=args.t, grid_n=args.n))
        ratio = res.distance / math.sqrt(res.epsilon / tau) if res.epsilon > 0 else float("nan")
        pts.append((res.epsilon, res.distance))
        print(f"{d:.5f}  {res.epsilon:.6e}  {res.distance:.6e}  {ratio:.4f}")
    slope, intercept, r2 = exponent_fit(pts)
    print(f"# fitted exponent: {slope:.4f}  (r2 = {r2:.6f})")

    if args.out:
        with open(args.out, "w") as fh:
            fh.write("# epsilon  distance\n")
            for e, d in pts:
                fh.write(f"{e!r} {d!r}\n")
            fh.write(f"# slope={slope!r} intercept={intercept!r} r2={r2!r}\n")
        print(f"# wrote {args.out}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
