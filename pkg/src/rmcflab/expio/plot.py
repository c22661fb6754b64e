"""Energy-versus-time plots with critical-value gridlines (SVG)."""

from __future__ import annotations

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402

from ..solitons import H_PLANE, critical_value  # noqa: E402


def emit_energy_plot(traces, path, labels=None, kmax=None):
    """Plot H against tau for each trace; dashed lines mark H(Sigma^k) and H(Pi).

    Output is deterministic for fixed input (no timestamp, fixed hash salt).
    """
    traces = list(traces)
    if not traces:
        raise ValueError("at least one trace is required")
    labels = labels or [None] * len(traces)
    if kmax is None:
        kmax = max((t.n or 1) + t.flat_dims for t in traces)
    with plt.rc_context({"svg.hashsalt": "rmcflab", "svg.fonttype": "none"}):
        fig, ax = plt.subplots(figsize=(7, 4.5))
        for k in range(1, kmax + 1):
            c = critical_value(k)
            ax.axhline(c, color="0.6", lw=0.6, ls="--")
            ax.annotate(f"$\\Sigma^{k}$", (1.0, c), xycoords=("axes fraction", "data"),
                        xytext=(3, 0), textcoords="offset points", va="center", fontsize=8)
        ax.axhline(H_PLANE, color="0.6", lw=0.6, ls=":")
        for tr, lab in zip(traces, labels):
            ax.plot(tr.taus, tr.energies, lw=1.2, label=lab)
        ax.set_xlabel("tau")
        ax.set_ylabel("Huisken energy")
        if any(labels):
            ax.legend(fontsize=8)
        fig.tight_layout()
        fig.savefig(path, format="svg", metadata={"Date": None})
        plt.close(fig)
    return path
