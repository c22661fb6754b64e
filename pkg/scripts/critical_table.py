"""Print H(Sigma^k) in closed form next to the Huisken energy of the discretized templates."""

import argparse

from rmcflab.convexgeom import huisken_energy
from rmcflab.solitons import critical_value, soliton_template


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--kmax", type=int, default=10)
    ap.add_argument("--quadrature-up-to", type=int, default=5,
                    help="evaluate the template quadrature for k <= this")
    args = ap.parse_args()
    print(f"{'k':>3} {'critical_value':>18} {'template energy':>18} {'diff':>10}")
    for k in range(0, args.kmax + 1):
        c = critical_value(k)
        if 1 <= k <= args.quadrature_up_to:
            H = huisken_energy(soliton_template(k, k))
            print(f"{k:>3} {c:18.12f} {H:18.12f} {H - c:10.1e}")
        else:
            print(f"{k:>3} {c:18.12f}")


if __name__ == "__main__":
    main()
