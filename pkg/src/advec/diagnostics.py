"""Measurements on solution profiles and run histories."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from advec.exceptions import ConfigurationError
from advec.schemes import ConservedState, Grid1D, NodalState

# first cell of the negative pulse in Example 1
EDGE_INDEX = 13
WINDOW_BEFORE = 8
WINDOW_AFTER = 4


@dataclass
class RunRecord:
    mass_series: list = field(default_factory=list)
    extrema_series: list = field(default_factory=list)
    snapshots: dict = field(default_factory=dict)
    metrics: dict = field(default_factory=dict)

    def observe(self, state, grid: Grid1D):
        f = state.f
        self.mass_series.append(total_mass(state, grid))
        self.extrema_series.append((float(f.min()), float(f.max())))

    @property
    def steps(self) -> int:
        return len(self.mass_series) - 1

    def mass_drift(self) -> float:
        return abs(self.mass_series[-1] - self.mass_series[0])


def total_mass(state, grid: Grid1D) -> float:
    """Sum of cell means times h; trapezoid sum of ``f`` for nodal states."""
    h = grid.h
    if isinstance(state, ConservedState):
        rho = state.rho if grid.periodic else state.rho[:-1]
        return float(np.sum(rho) * h)
    f = state.f if isinstance(state, NodalState) else np.asarray(state, dtype=float)
    if grid.periodic:
        return float(np.sum(f) * h)
    return float(np.trapezoid(f, dx=h))


def edge_window(profile, displacement, edge_index=EDGE_INDEX):
    """The 13 values around the advected left edge of the negative pulse.

    Covers indices ``i0-8 .. i0+4`` with ``i0 = edge_index + displacement``
    (periodic wrap); ``displacement`` is in cells and must be integral.
    """
    profile = np.asarray(profile, dtype=float)
    shift = float(displacement)
    if abs(shift - round(shift)) > 1e-9:
        raise ConfigurationError(f"edge window needs a whole-cell displacement, got {shift}")
    i0 = edge_index + int(round(shift))
    idx = np.arange(i0 - WINDOW_BEFORE, i0 + WINDOW_AFTER + 1) % profile.size
    return profile[idx]


def corner_max(profile, region) -> float:
    profile = np.asarray(profile, dtype=float)
    if isinstance(region, slice):
        return float(profile[region].max())
    lo, hi = region
    if not 0 <= lo < hi <= profile.size:
        raise ConfigurationError(f"region {region} outside the grid")
    return float(profile[lo:hi].max())


def monotone_edge_check(window, direction="decreasing", bounds=(-1.0, 0.0), tol=1e-9) -> bool:
    """True if ``window`` is monotone and stays within ``bounds`` (+/- tol)."""
    w = np.asarray(window, dtype=float)
    steps = np.diff(w)
    if direction == "decreasing":
        monotone = np.all(steps <= tol)
    elif direction == "increasing":
        monotone = np.all(steps >= -tol)
    else:
        raise ConfigurationError(f"unknown direction {direction!r}")
    lo, hi = bounds
    return bool(monotone and w.min() >= lo - tol and w.max() <= hi + tol)


def error_norms(profile, exact):
    """Mean absolute error and maximum error."""
    diff = np.asarray(profile, dtype=float) - np.asarray(exact, dtype=float)
    if diff.ndim != 1:
        raise ConfigurationError("profiles must be 1-D arrays of equal length")
    return float(np.mean(np.abs(diff))), float(np.max(np.abs(diff)))


def shock_position(u, grid: Grid1D) -> float:
    """Location of the steepest descending transition of ``u``.

    The transition is the run of strictly decreasing values around the
    steepest one-cell drop; the position is where ``u`` crosses the mean of
    the run's end values, by linear interpolation.
    """
    u = np.asarray(u, dtype=float)
    n = u.size
    if grid.periodic:
        nxt = np.roll(u, -1)
    else:
        nxt = np.append(u[1:], u[-1])
    drop = nxt - u
    j = int(np.argmin(drop))
    if not drop[j] < 0:
        raise ConfigurationError("profile has no descending transition")

    def at(i):
        return u[i % n] if grid.periodic else u[min(max(i, 0), n - 1)]

    a = j
    while a - 1 > j - n and at(a - 1) > at(a) and (grid.periodic or a > 0):
        a -= 1
    b = j + 1
    while b + 1 < j + n and at(b + 1) < at(b) and (grid.periodic or b < n - 1):
        b += 1
    level = 0.5 * (at(a) + at(b))
    for i in range(a, b):
        hi, lo = at(i), at(i + 1)
        if hi >= level >= lo:
            frac = 0.0 if hi == lo else (hi - level) / (hi - lo)
            pos = grid.x0 + (i + frac) * grid.h
            break
    else:  # pragma: no cover - the crossing always lies inside the run
        pos = grid.x0 + (j + 0.5) * grid.h
    if grid.periodic:
        length = n * grid.h
        pos = grid.x0 + (pos - grid.x0) % length
    return float(pos)


def periodic_distance(a: float, b: float, length: float) -> float:
    d = abs(a - b) % length
    return min(d, length - d)
