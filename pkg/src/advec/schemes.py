"""Semi-Lagrangian time steppers on a uniform 1-D grid.

Three families share the per-cell kernels of :mod:`advec.interpolants`:

* non-conservative (level 0): carries point values ``f`` and derivatives ``d``;
* conservative (level 1): carries ``f`` and cell averages ``rho``.  The
  interpolant is applied to the running integral ``D`` in place of ``f`` and
  to ``f`` in place of ``d``; only ``D_up - D_lo = rho*h`` enters, so ``D`` is
  never stored globally;
* two-time replacement (level 2): the same trick applied once more, carrying
  ``D`` at the points and cell averages ``e_rho`` of ``D``.

All departure data is gathered from time level ``n`` before anything is
written back.
"""

from __future__ import annotations

from dataclasses import dataclass, replace

import numpy as np

from advec.exceptions import CFLError, ConfigurationError
from advec.interpolants import (
    CellData,
    cell_outflux,
    csl2_coefficients,
    csl2_eval,
    gamma_switch,
    hcr_deriv,
    hcr_eval,
    hcr_params,
    rational_params,
)

KINDS = ("cubic", "rational", "modified_rational", "hcr", "csl2_direct")
BOUNDARIES = ("periodic", "open")
CFL_SLACK = 1e-12


@dataclass(frozen=True)
class Grid1D:
    n_cells: int
    h: float = 1.0
    bc: str = "periodic"
    x0: float = 0.0

    def __post_init__(self):
        if int(self.n_cells) < 3:
            raise ConfigurationError(f"need at least 3 grid points, got {self.n_cells}")
        if not self.h > 0:
            raise ConfigurationError(f"grid width must be positive, got {self.h}")
        if self.bc not in BOUNDARIES:
            raise ConfigurationError(f"unknown boundary condition {self.bc!r}")

    @property
    def x(self) -> np.ndarray:
        return self.x0 + self.h * np.arange(self.n_cells)

    @property
    def periodic(self) -> bool:
        return self.bc == "periodic"


@dataclass
class NodalState:
    f: np.ndarray
    d: np.ndarray

    def __post_init__(self):
        self.f = np.asarray(self.f, dtype=float)
        self.d = np.asarray(self.d, dtype=float)
        if self.f.shape != self.d.shape or self.f.ndim != 1:
            raise ConfigurationError("f and d must be 1-D arrays of equal length")
        if not (np.all(np.isfinite(self.f)) and np.all(np.isfinite(self.d))):
            raise ConfigurationError("non-finite entries in nodal state")

    def copy(self) -> NodalState:
        return NodalState(self.f.copy(), self.d.copy())


@dataclass
class ConservedState:
    """Point values ``f`` and cell averages ``rho``.

    ``rho[i]`` is the mean of ``f`` over ``[x_i, x_{i+1}]``; on a periodic grid
    the last cell wraps to ``x_0``, on an open grid it is an inert ghost.
    ``e_rho`` holds cell averages of the running integral ``D`` and is only
    present for two-time replacement runs.
    """

    f: np.ndarray
    rho: np.ndarray
    e_rho: np.ndarray | None = None

    def __post_init__(self):
        self.f = np.asarray(self.f, dtype=float)
        self.rho = np.asarray(self.rho, dtype=float)
        if self.f.shape != self.rho.shape or self.f.ndim != 1:
            raise ConfigurationError("f and rho must be 1-D arrays of equal length")
        if self.e_rho is not None:
            self.e_rho = np.asarray(self.e_rho, dtype=float)
            if self.e_rho.shape != self.f.shape:
                raise ConfigurationError("e_rho must match f in length")

    def copy(self) -> ConservedState:
        e = None if self.e_rho is None else self.e_rho.copy()
        return ConservedState(self.f.copy(), self.rho.copy(), e)


@dataclass(frozen=True)
class SchemeSpec:
    kind: str = "hcr"
    replacement_level: int = 1

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ConfigurationError(f"unknown scheme kind {self.kind!r}")
        if self.replacement_level not in (0, 1, 2):
            raise ConfigurationError(f"replacement level must be 0, 1 or 2, got {self.replacement_level}")
        if self.kind == "csl2_direct" and self.replacement_level != 1:
            raise ConfigurationError("csl2_direct is only defined at replacement level 1")

    @property
    def label(self) -> str:
        return f"{self.kind}/L{self.replacement_level}"


@dataclass(frozen=True)
class VelocityField:
    """Advection velocity: a constant ``u0`` or the advected field itself."""

    mode: str = "constant"
    u0: float = 0.0

    def __post_init__(self):
        if self.mode not in ("constant", "self"):
            raise ConfigurationError(f"unknown velocity mode {self.mode!r}")

    def values(self, f: np.ndarray) -> np.ndarray:
        if self.mode == "self":
            return np.asarray(f, dtype=float).copy()
        return np.full(np.shape(f), float(self.u0))


def departure_offset(u, dt, h):
    """Fractional departure offset ``k`` and upwind direction per point.

    ``direction`` is +1 where the upwind cell is ``[i, i+1]`` (``u < 0``) and
    -1 where it is ``[i-1, i]`` (``u >= 0``).  Raises :class:`CFLError` when a
    departure point leaves the upwind cell.
    """
    u = np.asarray(u, dtype=float)
    courant = np.abs(u) * dt / h
    bad = np.flatnonzero(np.atleast_1d(courant) > 1.0 + CFL_SLACK)
    if bad.size:
        raise CFLError(bad[0], np.atleast_1d(courant)[bad[0]])
    k = np.minimum(courant, 1.0)
    direction = np.where(u < 0, 1, -1)
    if np.ndim(u) == 0:
        return float(k), int(direction)
    return k, direction


def _neighbours(grid: Grid1D, direction: np.ndarray):
    """Upwind neighbour indices, upwind cell indices and an inflow mask.

    On an open grid, points whose upwind cell lies outside the domain are
    flagged in ``inflow`` and must be held fixed by the caller.
    """
    n = grid.n_cells
    idx = np.arange(n)
    up = idx + direction
    cell = np.where(direction > 0, idx, idx - 1)
    if grid.periodic:
        return up % n, cell % n, np.zeros(n, dtype=bool)
    inflow = (up < 0) | (up >= n)
    return np.clip(up, 0, n - 1), np.clip(cell, 0, n - 1), inflow


def _kernel(kind: str, cell: CellData, k):
    """Interpolated value and derivative at offset ``k`` for a scheme kind."""
    if kind == "hcr":
        p = hcr_params(cell)
    elif kind == "cubic":
        p = hcr_params(cell, alpha=0.0)
    elif kind == "rational":
        p = rational_params(cell)
    elif kind == "modified_rational":
        # a zero product (quiescent neighbour) counts as a sign change
        use_rational = gamma_switch(cell.d_lo, cell.d_up, inclusive=True).astype(bool)
        p = rational_params(cell)
        p = replace(p, alpha=np.where(use_rational, p.alpha, 0.0))
    else:
        raise ConfigurationError(f"{kind!r} has no hybrid kernel")
    return hcr_eval(p, k), hcr_deriv(p, k)


def _jacobian(u, u_up, h_signed, dt):
    # upwind-cell difference of the velocity; identically 1 for uniform u
    return 1.0 - (u_up - u) / h_signed * dt


def _check_level(spec: SchemeSpec, level: int):
    if spec.replacement_level != level:
        raise ConfigurationError(f"{spec.label} cannot be advanced by a level-{level} stepper")


def step_nonconservative(state: NodalState, vel: VelocityField, dt: float, grid: Grid1D,
                         spec: SchemeSpec) -> NodalState:
    _check_level(spec, 0)
    f, d = state.f, state.d
    u = vel.values(f)
    k, direction = departure_offset(u, dt, grid.h)
    up, _, inflow = _neighbours(grid, direction)
    h_s = direction * grid.h
    cell = CellData(f, f[up], d, d[up], h_s)
    value, deriv = _kernel(spec.kind, cell, k)
    d_new = deriv * _jacobian(u, u[up], h_s, dt)
    f_new = np.where(inflow, f, value)
    d_new = np.where(inflow, d, d_new)
    return NodalState(f_new, d_new)


def _primitive_departure(kind, f, rho, u, dt, grid):
    """Departure value of the local primitive and its derivative.

    The upwind cell carries ``D_lo = 0``, ``D_up = rho*h_signed`` and
    derivatives ``f_lo``, ``f_up``.  Returns ``(delta, deriv, u_up, h_signed,
    inflow)``.
    """
    k, direction = departure_offset(u, dt, grid.h)
    up, cell, inflow = _neighbours(grid, direction)
    h_s = direction * grid.h
    if kind == "csl2_direct":
        c = csl2_coefficients(f, f[up], rho[cell], h_s)
        xi = k * h_s
        delta, deriv = cell_outflux(c, xi), csl2_eval(c, xi)
    else:
        data = CellData(np.zeros_like(f), rho[cell] * h_s, f, f[up], h_s)
        delta, deriv = _kernel(kind, data, k)
    return delta, deriv, u[up], h_s, inflow


def _conservative_update(kind, f, rho, u_mass, u_adv, dt, grid, jacobian=True):
    """Advance ``(f, rho)`` one step; returns new arrays.

    ``u_mass`` transports the running integral (and so ``rho``), ``u_adv``
    transports ``f``.  They coincide for linear advection; Burgers' equation
    uses ``u/2`` for the former.
    """
    delta, deriv, u_up, h_s, inflow = _primitive_departure(kind, f, rho, u_mass, dt, grid)
    delta = np.where(inflow, 0.0, delta)
    if u_adv is not u_mass:
        _, deriv, u_up, h_s, inflow = _primitive_departure(kind, f, rho, u_adv, dt, grid)
    if jacobian:
        deriv = deriv * _jacobian(u_adv, u_up, h_s, dt)
    f_new = np.where(inflow, f, deriv)

    rho_new = rho.copy()
    if grid.periodic:
        rho_new += (np.roll(delta, -1) - delta) / grid.h
    else:
        rho_new[:-1] += (delta[1:] - delta[:-1]) / grid.h
    return f_new, rho_new


def step_conservative(state: ConservedState, vel: VelocityField, dt: float, grid: Grid1D,
                      spec: SchemeSpec) -> ConservedState:
    _check_level(spec, 1)
    if spec.kind == "csl2_direct":
        return step_csl2_direct(state, vel, dt, grid)
    u = vel.values(state.f)
    f_new, rho_new = _conservative_update(spec.kind, state.f, state.rho, u, u, dt, grid)
    return ConservedState(f_new, rho_new)


def step_csl2_direct(state: ConservedState, vel: VelocityField, dt: float,
                     grid: Grid1D) -> ConservedState:
    """CIP-CSL2 update written with the quadratic and its outflux integral."""
    u = vel.values(state.f)
    f_new, rho_new = _conservative_update("csl2_direct", state.f, state.rho, u, u, dt, grid)
    return ConservedState(f_new, rho_new)


def init_primitive(f0, grid: Grid1D) -> ConservedState:
    """Conservative state from point values, cell means by the trapezoid rule.

    Equivalent to building the running integral with ``D_0 = 0`` and
    ``D_i = D_{i-1} + h*(f_i + f_{i-1})/2``.
    """
    f0 = np.asarray(f0, dtype=float)
    if not np.all(np.isfinite(f0)):
        raise ConfigurationError("initial profile contains non-finite values")
    if f0.shape != (grid.n_cells,):
        raise ConfigurationError(f"initial profile has {f0.size} points, grid has {grid.n_cells}")
    return ConservedState(f0.copy(), _trapezoid_means(f0, grid))


def _trapezoid_means(values, grid):
    if grid.periodic:
        return 0.5 * (values + np.roll(values, -1))
    # inert ghost cell past the last point: constant continuation
    return 0.5 * (values + np.append(values[1:], values[-1]))


def running_integral(rho, grid: Grid1D) -> np.ndarray:
    """Point values of ``D`` with ``D_0 = 0``; length ``n_cells + 1`` when periodic."""
    h = grid.h
    if grid.periodic:
        return np.concatenate(([0.0], np.cumsum(rho) * h))
    return np.concatenate(([0.0], np.cumsum(rho[:-1]) * h))


def init_double_primitive(f0, grid: Grid1D) -> ConservedState:
    """Level-2 state: ``rho`` as in :func:`init_primitive`, plus trapezoid means of ``D``."""
    if grid.periodic:
        raise ConfigurationError("two-time replacement needs an open grid")
    state = init_primitive(f0, grid)
    D = running_integral(state.rho, grid)
    state.e_rho = _trapezoid_means(D, grid)
    return state


def step_double_replacement(state: ConservedState, vel: VelocityField, dt: float, grid: Grid1D,
                            spec: SchemeSpec) -> ConservedState:
    """Advance ``(E, D)`` exactly as the conservative step advances ``(D, f)``.

    ``D`` is carried at the points, ``E`` through its cell means ``e_rho``.
    ``rho`` and ``f`` are recovered by first and second differences.
    """
    _check_level(spec, 2)
    if grid.periodic:
        raise ConfigurationError("two-time replacement is not supported on a periodic grid")
    if state.e_rho is None:
        raise ConfigurationError("level-2 stepping needs e_rho; use init_double_primitive")
    h = grid.h
    D = running_integral(state.rho, grid)
    u = vel.values(state.f)
    D_new, e_new = _conservative_update(spec.kind, D, state.e_rho, u, u, dt, grid)
    rho = state.rho.copy()
    rho[:-1] = np.diff(D_new) / h
    # E is quiescent (zero) left of the domain
    f = np.diff(np.concatenate(([0.0], e_new[:-1]))) / h
    f = np.append(f, f[-1])
    return ConservedState(f, rho, e_new)


def step(state, vel: VelocityField, dt: float, grid: Grid1D, spec: SchemeSpec):
    """Dispatch to the stepper matching ``spec.replacement_level``."""
    if spec.replacement_level == 0:
        return step_nonconservative(state, vel, dt, grid, spec)
    if spec.replacement_level == 1:
        return step_conservative(state, vel, dt, grid, spec)
    return step_double_replacement(state, vel, dt, grid, spec)


def step_conservative_global(state: ConservedState, vel: VelocityField, dt: float, grid: Grid1D,
                             spec: SchemeSpec) -> ConservedState:
    """Reference conservative step with a global running integral ``D``.

    Slower and subject to larger roundoff than :func:`step_conservative`;
    kept to cross-check the local-primitive formulation.
    """
    _check_level(spec, 1)
    if not grid.periodic:
        raise ConfigurationError("the global-primitive check is written for periodic grids")
    f, rho, h, n = state.f, state.rho, grid.h, grid.n_cells
    D = running_integral(rho, grid)
    mass = D[-1]
    u = vel.values(f)
    k, direction = departure_offset(u, dt, h)
    up = np.arange(n) + direction
    D_up = np.where(up < 0, D[n - 1] - mass, D[np.clip(up, 0, n)])
    f_up = f[up % n]
    h_s = direction * h
    kind = "cubic" if spec.kind == "csl2_direct" else spec.kind
    value, deriv = _kernel(kind, CellData(D[:n], D_up, f, f_up, h_s), k)
    D_new = np.append(value, value[0] + mass)
    deriv = deriv * _jacobian(u, u[up % n], h_s, dt)
    return ConservedState(deriv, np.diff(D_new) / h)
