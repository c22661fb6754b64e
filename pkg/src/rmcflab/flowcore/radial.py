"""Explicit steppers for the radial graph ``|x| = r(y)`` in R^{n+1}.

    MCF:   r_t = r_yy / (1 + r_y^2) - (n - 1) / r
    RMCF:  r_t = r_yy / (1 + r_y^2) - (n - 1) / r + r / 2 - (y / 2) r_y

Capped profiles are only updated where the graph is not too steep
(|r_y| <= ``radial_slope_max``); beyond the outermost such node the cap is
refit by the sphere tangent to the graph there, which is the smooth-cap
limit of the singular term.  Periodic profiles wrap around, clamped
profiles hold their end values.
"""

from __future__ import annotations

import numpy as np

from ..defaults import DEFAULTS
from ..profiles import RadialProfile
from .errors import DomainError, FlowInstability, NearExtinction


def _derivatives(r, dy, periodic):
    if periodic:
        rp, rm = np.roll(r, -1), np.roll(r, 1)
    else:
        rp = np.empty_like(r)
        rm = np.empty_like(r)
        rp[:-1], rp[-1] = r[1:], r[-1]
        rm[1:], rm[0] = r[:-1], r[0]
    return (rp - rm) / (2.0 * dy), (rp - 2.0 * r + rm) / (dy * dy)


def radial_rhs(profile: RadialProfile, mode="MCF"):
    """Right-hand side at every node (meaningful on the updated node set only)."""
    n, y, r = profile.n, profile.y, profile.r
    ry, ryy = _derivatives(r, profile.dy, profile.tip == "periodic")
    with np.errstate(divide="ignore", invalid="ignore"):
        rhs = ryy / (1.0 + ry * ry) - (n - 1) / r
    if mode == "RMCF":
        rhs = rhs + 0.5 * r - 0.5 * y * ry
    elif mode != "MCF":
        raise ValueError(f"unknown mode {mode!r}")
    return rhs, ry


def _good_block(profile, ry):
    """Contiguous index range [i0, i1] of nodes evolved by the PDE (capped profiles)."""
    r = profile.r
    act = r > 0
    interior = act.copy()
    interior[1:] &= act[:-1]
    interior[:-1] &= act[1:]
    interior[0] = interior[-1] = False
    good = interior & (np.abs(ry) <= DEFAULTS.flow.radial_slope_max)
    idx = np.nonzero(good)[0]
    if idx.size < 3:
        raise NearExtinction("fewer than three resolvable nodes remain")
    k = int(np.argmax(np.where(good, r, -np.inf)))
    i0 = k
    while i0 - 1 >= 0 and good[i0 - 1]:
        i0 -= 1
    i1 = k
    while i1 + 1 < len(r) and good[i1 + 1]:
        i1 += 1
    if i1 - i0 < 2:
        raise NearExtinction("fewer than three resolvable nodes remain")
    return i0, i1


def _refit_caps(y, r, i0, i1, dy):
    """Replace the nodes outside [i0, i1] by tangent spheres; returns (r, tips)."""
    out = r.copy()
    # lower cap from i0 (one-sided second-order slope)
    s_lo = (-3.0 * r[i0] + 4.0 * r[i0 + 1] - r[i0 + 2]) / (2.0 * dy)
    s_hi = (3.0 * r[i1] - 4.0 * r[i1 - 1] + r[i1 - 2]) / (2.0 * dy)
    tips = []
    for k, s, sign, sl in ((i0, s_lo, -1.0, slice(0, i0)), (i1, s_hi, 1.0, slice(i1 + 1, None))):
        yc = y[k] + r[k] * s
        rho = np.hypot(r[k], r[k] * s)
        tip = yc + sign * rho
        if (sign < 0 and tip < y[0]) or (sign > 0 and tip > y[-1]):
            raise DomainError("cap tip left the y-grid")
        out[sl] = np.sqrt(np.maximum(rho * rho - (y[sl] - yc) ** 2, 0.0))
        tips.append(float(tip))
    return out, (tips[0], tips[1])


def check_profile(profile: RadialProfile, tol=None):
    tol = DEFAULTS.flow.convexity_tol if tol is None else tol
    r = profile.r
    if not np.all(np.isfinite(r)):
        raise FlowInstability("non-finite radii")
    if profile.tip == "periodic":
        if (r <= 0).any():
            raise FlowInstability("radius vanished on a periodic profile")
        return
    act = np.nonzero(r > 0)[0]
    seg = r[act[0]:act[-1] + 1]
    if (seg <= 0).any():
        raise FlowInstability("profile pinched off (disconnected support)")
    d2 = np.diff(seg, 2)
    scale = tol * max(1.0, float(seg.max()))
    if (d2 > scale).any():
        raise FlowInstability("profile lost concavity (convexity lost)")


def radial_dt_limit(profile: RadialProfile, cfl=None):
    cfl = DEFAULTS.flow.cfl if cfl is None else cfl
    rmin = profile.min_radius()
    lim = profile.dy ** 2
    if profile.n > 1:
        if profile.tip == "capped":
            # tip nodes are refit, the reaction term only acts where the graph is flat
            rmin = max(rmin, profile.dy)
        lim = min(lim, rmin * rmin / (profile.n - 1))
    return cfl * lim


def _step(profile, dt, mode):
    if dt < 0:
        raise ValueError("dt must be nonnegative")
    if dt == 0:
        return profile
    rhs, ry = radial_rhs(profile, mode)
    r = profile.r.copy()
    if profile.tip == "periodic":
        r = r + dt * rhs
        new = RadialProfile(profile.n, profile.y, np.maximum(r, 0.0), "periodic", profile.period)
    elif profile.tip == "clamped":
        r[1:-1] += dt * rhs[1:-1]
        if (r <= 0).any():
            raise FlowInstability("radius vanished on a clamped profile")
        new = RadialProfile(profile.n, profile.y, r, "clamped")
    else:
        i0, i1 = _good_block(profile, ry)
        r[i0:i1 + 1] += dt * rhs[i0:i1 + 1]
        if (r[i0:i1 + 1] <= 0).any():
            raise NearExtinction("profile radius reached zero")
        r, tips = _refit_caps(profile.y, r, i0, i1, profile.dy)
        new = RadialProfile(profile.n, profile.y, r, "capped", tips=tips)
    check_profile(new)
    return new


def mcf_step_radial(profile: RadialProfile, dt) -> RadialProfile:
    """One explicit Euler step of MCF for a radial graph."""
    return _step(profile, dt, "MCF")


def rmcf_step_radial(profile: RadialProfile, dtau) -> RadialProfile:
    """One explicit Euler step of rescaled MCF for a radial graph."""
    return _step(profile, dtau, "RMCF")
