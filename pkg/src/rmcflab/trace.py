"""Orbit traces: time-indexed samples of a flow run."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

TERMINATIONS = ("horizon", "converged", "near-extinct", "error")


@dataclass(frozen=True)
class TraceSample:
    tau: float
    t: float
    energy: float
    mass: float
    inradius: float
    circumradius: float
    event: str = ""
    snapshot: object = field(default=None, repr=False, compare=False)


@dataclass(frozen=True)
class OrbitTrace:
    """Immutable record of a run.

    ``mode`` is ``"MCF"`` or ``"RMCF"``.  For MCF runs ``tau`` equals ``t``.
    ``flat_dims`` counts the flat factor of product shapes; energies and
    masses are those of the whole product (which equal the compact factor's).
    ``n`` is the dimension of the compact factor's boundary.
    """

    mode: str
    samples: tuple
    termination: str = "horizon"
    n: int | None = None
    flat_dims: int = 0
    meta: dict = field(default_factory=dict, compare=False)

    def __post_init__(self):
        object.__setattr__(self, "samples", tuple(self.samples))
        if self.termination not in TERMINATIONS:
            raise ValueError(f"unknown termination {self.termination!r}")

    def __len__(self):
        return len(self.samples)

    def column(self, name):
        return np.array([getattr(s, name) for s in self.samples], dtype=float)

    @property
    def taus(self):
        return self.column("tau")

    @property
    def energies(self):
        return self.column("energy")

    @property
    def masses(self):
        return self.column("mass")

    @property
    def terminal(self):
        return self.samples[-1] if self.samples else None

    def replace(self, **changes):
        kw = dict(mode=self.mode, samples=self.samples, termination=self.termination, n=self.n,
                  flat_dims=self.flat_dims, meta=dict(self.meta))
        kw.update(changes)
        return OrbitTrace(**kw)
