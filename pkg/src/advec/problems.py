"""Problem setups, Burgers' stepping and reference solutions."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from advec.exceptions import ConfigurationError
from advec.schemes import (
    ConservedState,
    Grid1D,
    NodalState,
    SchemeSpec,
    VelocityField,
    _conservative_update,
    init_double_primitive,
    init_primitive,
    step,
    step_nonconservative,
)

PROBLEMS = ("example1", "example2", "example3_burgers", "example4", "custom")

# quiescent cells kept free on each side of the two-time replacement domain
EXAMPLE4_MARGIN = 20


@dataclass
class ProblemSpec:
    name: str
    grid: Grid1D
    dt: float
    steps: int
    profile: Callable[[np.ndarray], np.ndarray] | None = None
    velocity: VelocityField = field(default_factory=VelocityField)
    initial: np.ndarray | None = None

    def __post_init__(self):
        if self.name not in PROBLEMS:
            raise ConfigurationError(f"unknown problem {self.name!r}")
        if self.steps < 0:
            raise ConfigurationError("steps must be non-negative")
        if not self.dt > 0:
            raise ConfigurationError("time step must be positive")
        if self.velocity.mode == "constant":
            c = self.cfl
            if not 0 <= c <= 1:
                raise ConfigurationError(f"CFL number {c} outside (0, 1]")

    @property
    def cfl(self) -> float:
        if self.velocity.mode != "constant":
            raise ConfigurationError(f"{self.name} has no single CFL number")
        return abs(self.velocity.u0) * self.dt / self.grid.h

    @property
    def is_burgers(self) -> bool:
        return self.velocity.mode == "self"

    def initial_profile(self) -> np.ndarray:
        if self.initial is not None:
            return np.array(self.initial, dtype=float)
        return np.asarray(self.profile(self.grid.x), dtype=float)

    def with_overrides(self, *, n_cells=None, cfl=None, dt=None, steps=None) -> ProblemSpec:
        grid = self.grid
        if n_cells is not None:
            if self.initial is not None:
                raise ConfigurationError("cannot resize a tabulated initial profile")
            grid = Grid1D(int(n_cells), grid.h, grid.bc, grid.x0)
        if cfl is not None and dt is not None:
            raise ConfigurationError("give either cfl or dt, not both")
        new_dt = self.dt
        if dt is not None:
            new_dt = float(dt)
        elif cfl is not None:
            if self.is_burgers:
                raise ConfigurationError("Burgers' problems take dt, not cfl")
            new_dt = float(cfl) * grid.h / abs(self.velocity.u0)
        return ProblemSpec(self.name, grid, new_dt, self.steps if steps is None else int(steps),
                           self.profile, self.velocity, self.initial)


def example1_profile(x):
    x = np.asarray(x, dtype=float)
    return np.where((x >= 13) & (x <= 21), -1.0, np.where((x >= 40) & (x <= 48), 1.0, 0.0))


def example2_profile(x):
    x = np.asarray(x, dtype=float)
    return np.select(
        [(x >= 20) & (x < 31), (x >= 31) & (x < 41), (x >= 41) & (x < 60), (x >= 60) & (x < 80)],
        [(x - 20) / 11, 1 - (x - 31) / 20, 0.5 + 0 * x, 1.0 + 0 * x],
        0.0,
    )


def burgers_profile(x):
    return 0.5 + 0.4 * np.cos(2 * np.pi * np.asarray(x, dtype=float) / 100)


def init_example1():
    """Two square pulses of width 9h, u = 1, CFL 0.2, periodic N = 100."""
    spec = ProblemSpec("example1", Grid1D(100), dt=0.2, steps=200, profile=example1_profile,
                       velocity=VelocityField("constant", 1.0))
    return spec, spec.initial_profile()


def init_example2():
    """Ramp, triangle, plateau and square wave; CFL 0.2 to n = 440 on N = 200."""
    spec = ProblemSpec("example2", Grid1D(200), dt=0.2, steps=440, profile=example2_profile,
                       velocity=VelocityField("constant", 1.0))
    return spec, spec.initial_profile()


def init_example4():
    """Example 2 on an open grid, for two-time replacement runs.

    Features occupy 20 <= x < 80 and travel 88 cells, so at least
    ``EXAMPLE4_MARGIN`` quiescent cells remain on either side.
    """
    spec = ProblemSpec("example4", Grid1D(200, bc="open"), dt=0.2, steps=440,
                       profile=example2_profile, velocity=VelocityField("constant", 1.0))
    return spec, spec.initial_profile()


def init_burgers():
    """u0 = 0.5 + 0.4 cos(2 pi x / 100) on one period, h = 1, dt = 0.1."""
    spec = ProblemSpec("example3_burgers", Grid1D(100), dt=0.1, steps=1000,
                       profile=burgers_profile, velocity=VelocityField("self"))
    return spec, spec.initial_profile()


def init_custom(f0, *, h=1.0, bc="periodic", dt=0.2, u=1.0, steps=0, x0=0.0):
    f0 = np.asarray(f0, dtype=float)
    vel = VelocityField("self") if u == "self" else VelocityField("constant", float(u))
    spec = ProblemSpec("custom", Grid1D(f0.size, h, bc, x0), dt=dt, steps=steps,
                       velocity=vel, initial=f0)
    return spec, f0.copy()


def load_problem(name: str):
    loaders = {
        "example1": init_example1,
        "example2": init_example2,
        "example3_burgers": init_burgers,
        "example4": init_example4,
    }
    if name not in loaders:
        raise ConfigurationError(f"unknown problem {name!r}; choose from {sorted(loaders)}")
    return loaders[name]()


def initial_state(problem: ProblemSpec, spec: SchemeSpec, d_init: str = "zero", f0=None):
    """Build the state a scheme starts from.

    ``d_init`` selects the level-0 derivative: ``"zero"`` or ``"centered"``
    differences of the initial profile.
    """
    f0 = problem.initial_profile() if f0 is None else np.asarray(f0, dtype=float)
    grid = problem.grid
    if spec.replacement_level == 0:
        if d_init == "zero":
            d0 = np.zeros_like(f0)
        elif d_init == "centered":
            d0 = _centered_difference(f0, grid)
        else:
            raise ConfigurationError(f"unknown d initialisation {d_init!r}")
        return NodalState(f0, d0)
    if spec.replacement_level == 1:
        return init_primitive(f0, grid)
    return init_double_primitive(f0, grid)


def _centered_difference(f, grid):
    if grid.periodic:
        return (np.roll(f, -1) - np.roll(f, 1)) / (2 * grid.h)
    return np.gradient(f, grid.h)


def burgers_step(state, dt: float, grid: Grid1D, spec: SchemeSpec):
    """One step of u_t + u u_x = 0 with the advected field as velocity.

    The conservative form moves mass with velocity u/2, while ``u`` itself is
    carried with velocity ``u``.
    """
    if spec.replacement_level == 0:
        return step_nonconservative(state, VelocityField("self"), dt, grid, spec)
    if spec.replacement_level != 1:
        raise ConfigurationError("Burgers' stepping supports replacement levels 0 and 1")
    u = state.f
    f_new, rho_new = _conservative_update(spec.kind, u, state.rho, 0.5 * u, u, dt, grid)
    return ConservedState(f_new, rho_new)


def advance(state, problem: ProblemSpec, spec: SchemeSpec):
    if problem.is_burgers:
        return burgers_step(state, problem.dt, problem.grid, spec)
    return step(state, problem.velocity, problem.dt, problem.grid, spec)


def upwind_oracle_step(u, dt: float, grid: Grid1D) -> np.ndarray:
    """First-order upwind step of u_t + (u^2/2)_x = 0 for positive u."""
    u = np.asarray(u, dtype=float)
    if np.any(u <= 0):
        raise ConfigurationError("the upwind oracle needs a strictly positive field")
    flux = 0.5 * u * u
    return u - dt / grid.h * (flux - np.roll(flux, 1))


def godunov_oracle_step(u, dt: float, grid: Grid1D) -> np.ndarray:
    """Godunov step of Burgers' conservation form; handles either sign of u."""
    u = np.asarray(u, dtype=float)
    ul, ur = u, np.roll(u, -1)
    flux = np.where(
        ul <= ur,
        np.where(ul > 0, 0.5 * ul * ul, np.where(ur < 0, 0.5 * ur * ur, 0.0)),
        np.maximum(0.5 * ul * ul, 0.5 * ur * ur),
    )
    return u - dt / grid.h * (flux - np.roll(flux, 1))


def reference_burgers(t_end: float, refine: int = 5, *, h=1.0, dt=0.1, length=100.0,
                      profile=burgers_profile, signed=False):
    """Fine-grid oracle: grid and step both refined ``refine`` times.

    Returns ``(x, u)``.
    """
    grid = Grid1D(int(round(length / h)) * refine, h / refine)
    fine_dt = dt / refine
    u = profile(grid.x)
    oracle = godunov_oracle_step if signed else upwind_oracle_step
    for _ in range(int(round(t_end / fine_dt))):
        u = oracle(u, fine_dt, grid)
    return grid.x, u


def velocity_shift_run(state, C: float, m: int, steps: int, dt: float, grid: Grid1D,
                       spec: SchemeSpec):
    """Burgers' run on ``U = u + C`` with the linear part done by index shifts.

    After every ``m`` self-advection steps ``U`` is moved one cell, which
    requires ``m*|C*dt| = h``.  Returns the state of ``U``.
    """
    if not grid.periodic:
        raise ConfigurationError("velocity shifting needs a periodic grid")
    if m < 1 or abs(m * abs(C) * dt - grid.h) > 1e-12 * grid.h:
        raise ConfigurationError(f"m*|C*dt| must equal h (got {m * abs(C) * dt})")
    shift = -int(np.sign(C))
    if isinstance(state, NodalState):
        cur = NodalState(state.f + C, state.d.copy())
    else:
        cur = ConservedState(state.f + C, state.rho + C)
    for n in range(1, steps + 1):
        cur = burgers_step(cur, dt, grid, spec)
        if n % m == 0:
            if isinstance(cur, NodalState):
                cur = NodalState(np.roll(cur.f, shift), np.roll(cur.d, shift))
            else:
                cur = ConservedState(np.roll(cur.f, shift), np.roll(cur.rho, shift))
    return cur


def exact_linear_solution(problem: ProblemSpec, n: int) -> np.ndarray:
    """Initial profile translated by ``n*u*dt`` with periodic wrap."""
    if problem.is_burgers:
        raise ConfigurationError("no exact linear solution for Burgers' equation")
    grid = problem.grid
    shift = problem.velocity.u0 * problem.dt * n
    if problem.profile is None:
        cells = shift / grid.h
        if abs(cells - round(cells)) > 1e-9:
            raise ConfigurationError("tabulated profiles only translate by whole cells")
        return np.roll(problem.initial, int(round(cells)))
    length = grid.n_cells * grid.h
    x = grid.x - shift
    if grid.periodic:
        x = grid.x0 + np.mod(x - grid.x0, length)
        # undo roundoff that pushes a grid point just below a breakpoint
        x = np.round(x, 9)
    return np.asarray(problem.profile(x), dtype=float)


def simulate(problem: ProblemSpec, spec: SchemeSpec, steps=None, snapshot_steps=(),
             d_init="zero", state=None):
    """Run ``steps`` steps, recording mass and extrema after every step.

    Returns ``(record, final_state)``.  A :class:`~advec.exceptions.CFLError`
    propagates with ``record`` attached as ``err.record``.
    """
    from advec.diagnostics import RunRecord

    steps = problem.steps if steps is None else int(steps)
    if state is None:
        state = initial_state(problem, spec, d_init)
    record = RunRecord()
    wanted = set(int(s) for s in snapshot_steps)
    if any(s < 0 or s > steps for s in wanted):
        raise ConfigurationError("snapshot steps must lie in [0, steps]")
    record.observe(state, problem.grid)
    if 0 in wanted:
        record.snapshots[0] = state.f.copy()
    for n in range(1, steps + 1):
        try:
            state = advance(state, problem, spec)
        except Exception as err:
            err.record = record
            err.step = n
            raise
        record.observe(state, problem.grid)
        if n in wanted:
            record.snapshots[n] = state.f.copy()
    return record, state
