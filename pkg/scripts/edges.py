"""Run edge experiments: thin ellipsoids that start near Sigma^i and settle on Sigma^j.

Writes one CSV trace per run and a shared energy plot, and prints the limit,
initial/terminal energies and the Sigma^i plateau length.
"""

import argparse
import time
from pathlib import Path

from rmcflab.dynamics import (check_mass_decay, check_monotone_energy, classify_limit,
                              detect_plateaus, edge_experiment, plateau_length)
from rmcflab.expio import emit_energy_plot, write_trace_csv


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--edge", type=int, nargs=2, default=(1, 2))
    ap.add_argument("--alpha", type=float, nargs="+", default=[0.2, 0.1])
    ap.add_argument("--n", type=int, default=3, choices=(2, 3))
    ap.add_argument("--out", type=Path, default=Path("out/edges"))
    args = ap.parse_args()
    args.out.mkdir(parents=True, exist_ok=True)
    edge = tuple(args.edge)
    traces, labels = [], []
    for a in args.alpha:
        t0 = time.perf_counter()
        tr = edge_experiment(edge, a, n=args.n)
        dt = time.perf_counter() - t0
        plateaus = detect_plateaus(tr)
        mono, mass = check_monotone_energy(tr), check_mass_decay(tr)
        name = f"edge{edge[0]}{edge[1]}_n{args.n}_a{a:g}"
        write_trace_csv(tr, args.out / f"{name}.csv")
        traces.append(tr)
        labels.append(f"alpha={a:g}")
        print(f"alpha={a:g}: {tr.termination} at tau={tr.meta['tau_reached']:.1f} ({dt:.0f} s); "
              f"limit {classify_limit(tr)}; H0={tr.energies[0]:.7f} H_end={tr.terminal.energy:.7f}; "
              f"Sigma^{edge[0]} plateau {plateau_length(plateaus, edge[0]):.2f}; "
              f"audits {mono.passed and mass.passed}")
    emit_energy_plot(traces, args.out / f"edge{edge[0]}{edge[1]}_n{args.n}.svg", labels)


if __name__ == "__main__":
    main()
