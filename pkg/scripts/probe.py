"""Randomized search for the largest Huisken energy among convex ellipsoids and products."""

import argparse

from rmcflab.dynamics import energy_bound_probe
from rmcflab.solitons import critical_value


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--n", type=int, default=2)
    ap.add_argument("--samples", type=int, default=200)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args()
    res = energy_bound_probe(args.n, args.samples, seed=args.seed)
    print(f"max energy {res.max_energy:.7f} at {res.argmax}")
    print(f"H(Sigma^1) = {critical_value(1):.7f}")


if __name__ == "__main__":
    main()
