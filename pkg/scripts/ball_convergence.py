"""Ball extinction time and the spatial convergence rate of the radius law R(t) = sqrt(1 - 4t)."""

import argparse
import math

import numpy as np

from rmcflab.convexgeom import Ball
from rmcflab.flowcore import SolverOptions, run_flow


def radius_error(delta, c, horizon, dim):
    opts = SolverOptions(resolution=delta, remesh="fixed", observer_stride=10)
    h = 2 * math.sin(0.25 * math.pi / math.ceil(0.5 * math.pi / delta))
    tr = run_flow(Ball(1.0, dim), "MCF", horizon, dt=c * h * h, options=opts)
    n = dim - 1
    R = np.sqrt(1 - 2 * n * tr.column("t"))
    return max(np.abs(tr.column("inradius") - R).max(),
               np.abs(tr.column("circumradius") - R).max())


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--dim", type=int, default=3)
    ap.add_argument("--deltas", type=float, nargs="+", default=[0.08, 0.04, 0.02])
    ap.add_argument("--c", type=float, default=0.1, help="dt / h^2")
    ap.add_argument("--horizon", type=float, default=0.2)
    args = ap.parse_args()
    tr = run_flow(Ball(1.0, args.dim), "MCF", 1.0)
    T = tr.meta["extinction_time"]
    print(f"extinction time {T:.7f} (exact {1 / (2 * (args.dim - 1)):.7f})")
    prev = None
    for d in args.deltas:
        e = radius_error(d, args.c, args.horizon, args.dim)
        print(f"delta={d:g}: max radius error {e:.3e}" + (f", ratio {prev / e:.2f}" if prev else ""))
        prev = e


if __name__ == "__main__":
    main()
