#!/usr/bin/env python3
"""Radial counterexample sweep: fit the stability exponent in dimension n.

  python3 scripts/radial_exponent_sweep.py --dim 2 --out radial.dat
"""

import argparse
import math
import sys

import numpy as np

from plstab import CounterexampleConfig, exponent_fit, radial_counterexample_family


def main() -> int:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--dim", type=int, default=2)
    ap.add_argument("--t", type=float, default=0.5)
    ap.add_argument("--n", type=int, default=4096)
    ap.add_argument("--points", type=int, default=8)
    ap.add_argument("--out", default=None)
    args = ap.parse_args()

    deltas = np.exp(np.linspace(math.log(0.01), math.log(0.12), args.points))
    pts = []
    print("# delta  epsilon  distance")
    for d in deltas:
        cfg = CounterexampleConfig(delta=float(d), t=args.t, grid_n=args.n, phi_id="even_radial")
        res = radial_counterexample_family(cfg, args.dim)
        pts.append((res.epsilon, res.distance))
        print(f"{d:.5f}  {res.epsilon:.6e}  {res.distance:.6e}")
    slope, intercept, r2 = exponent_fit(pts)
    print(f"# fitted exponent: {slope:.4f}  (r2 = {r2:.6f})")
    if args.out:
        with open(args.out, "w") as fh:
            fh.write("# epsilon  distance\n")
            for e, d in pts:
                fh.write(f"{e!r} {d!r}\n")
            fh.write(f"# slope={slope!r} r2={r2!r}\n")
        print(f"# wrote {args.out}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
