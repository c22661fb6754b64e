"""Tabulate the asymptotic slope A_a of expanding solitons with their error diagnostics."""

import argparse

from rmcflab.solitons import expander_solve


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--a", type=float, nargs="+", default=[0.5, 1.0, 2.0])
    ap.add_argument("--n", type=int, nargs="+", default=[2, 3])
    ap.add_argument("--eta-max", type=float, default=None)
    args = ap.parse_args()
    print(f"{'a':>6} {'n':>3} {'A_a':>12} {'residual':>10} {'rich. gap':>10}")
    for n in args.n:
        for a in args.a:
            s = expander_solve(a, n, eta_max=args.eta_max)
            print(f"{a:6g} {n:3d} {s.slope:12.8f} {s.residual:10.1e} {s.richardson_gap:10.1e}")


if __name__ == "__main__":
    main()
