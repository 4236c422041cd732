import numpy as np
import pytest

from advec.diagnostics import shock_position, total_mass
from advec.exceptions import CFLError, ConfigurationError
from advec.problems import (
    burgers_step,
    exact_linear_solution,
    godunov_oracle_step,
    init_burgers,
    init_custom,
    init_example1,
    init_example2,
    init_example4,
    initial_state,
    load_problem,
    simulate,
    upwind_oracle_step,
    velocity_shift_run,
)
from advec.schemes import ConservedState, Grid1D, NodalState, SchemeSpec


def test_example1_initial_values():
    problem, f0 = init_example1()
    assert f0.size == 100 and problem.cfl == pytest.approx(0.2)
    assert f0[13] == -1.0 and f0[21] == -1.0 and f0[22] == 0.0
    assert f0[40] == 1.0 and f0[48] == 1.0
    assert f0.sum() == 0.0


def test_example2_initial_values():
    _, f0 = init_example2()
    assert f0[31] == 1.0
    assert f0[30] == pytest.approx(10 / 11, abs=1e-15)
    assert f0[59] == 0.5 and f0[60] == 1.0 and f0[80] == 0.0


def test_burgers_initial_values():
    problem, u0 = init_burgers()
    assert problem.is_burgers
    assert u0[0] == pytest.approx(0.9) and u0[50] == pytest.approx(0.1)
    with pytest.raises(ConfigurationError):
        problem.cfl


def test_example4_is_open():
    problem, f0 = init_example4()
    assert not problem.grid.periodic
    assert np.array_equal(f0, init_example2()[1])


def test_load_problem_unknown():
    with pytest.raises(ConfigurationError):
        load_problem("example9")


def test_cfl_out_of_range_rejected():
    problem, _ = init_example1()
    with pytest.raises(ConfigurationError):
        problem.with_overrides(cfl=1.5)
    with pytest.raises(ConfigurationError):
        problem.with_overrides(cfl=0.5, dt=0.1)


def test_exact_solution_translates_pulses():
    problem, _ = init_example1()
    exact = exact_linear_solution(problem, 200)
    assert np.all(exact[53:62] == -1.0) and exact[52] == 0.0 and exact[62] == 0.0
    assert np.all(exact[80:89] == 1.0) and exact[79] == 0.0 and exact[89] == 0.0


def test_exact_solution_for_tabulated_profile():
    spec, f0 = init_custom(np.arange(10.0), dt=0.5)
    assert np.array_equal(exact_linear_solution(spec, 4), np.roll(f0, 2))
    with pytest.raises(ConfigurationError):
        exact_linear_solution(spec, 1)


def test_upwind_oracle_conserves_and_does_not_grow_extrema():
    grid = Grid1D(100)
    _, u = init_burgers()
    m0 = u.sum()
    tv0 = np.abs(np.diff(u)).sum()
    for _ in range(500):
        new = upwind_oracle_step(u, 0.1, grid)
        assert new.max() <= u.max() + 1e-15 and new.min() >= u.min() - 1e-15
        u = new
    assert u.sum() == pytest.approx(m0, abs=1e-12)
    assert np.abs(np.diff(u)).sum() <= tv0 + 1e-12


def test_upwind_oracle_rejects_non_positive():
    with pytest.raises(ConfigurationError):
        upwind_oracle_step(np.array([0.5, 0.0, 0.5]), 0.1, Grid1D(3))


def test_godunov_matches_upwind_for_positive_data():
    grid = Grid1D(100)
    _, u = init_burgers()
    assert np.allclose(godunov_oracle_step(u, 0.1, grid), upwind_oracle_step(u, 0.1, grid),
                       atol=1e-15)


@pytest.mark.parametrize("level", [0, 1])
def test_burgers_constant_state(level):
    grid = Grid1D(20)
    spec = SchemeSpec("hcr", level)
    if level == 0:
        state = NodalState(np.full(20, 0.4), np.zeros(20))
    else:
        state = ConservedState(np.full(20, 0.4), np.full(20, 0.4))
    for _ in range(10):
        state = burgers_step(state, 0.5, grid, spec)
    assert np.abs(state.f - 0.4).max() <= 1e-14


def test_burgers_conservative_mass():
    problem, _ = init_burgers()
    record, state = simulate(problem, SchemeSpec("hcr", 1), steps=300)
    assert total_mass(state, problem.grid) == pytest.approx(50.0, abs=1e-10)
    assert record.mass_drift() <= 1e-10


def test_burgers_rejects_level_two():
    with pytest.raises(ConfigurationError):
        burgers_step(ConservedState(np.ones(5), np.ones(5), np.ones(5)), 0.1, Grid1D(5),
                     SchemeSpec("hcr", 2))


def test_simulate_records_every_step_and_snapshots():
    problem, f0 = init_example1()
    record, _ = simulate(problem, SchemeSpec("hcr", 1), steps=10, snapshot_steps=(0, 5))
    assert len(record.mass_series) == 11
    assert sorted(record.snapshots) == [0, 5]
    assert np.array_equal(record.snapshots[0], f0)


def test_simulate_attaches_record_on_cfl_abort():
    problem, _ = init_burgers()
    problem = problem.with_overrides(dt=1.2)
    with pytest.raises(CFLError) as info:
        simulate(problem, SchemeSpec("hcr", 1), steps=5)
    assert len(info.value.record.mass_series) >= 1


def test_level0_initial_derivative_choices():
    problem, f0 = init_burgers()
    zero = initial_state(problem, SchemeSpec("hcr", 0), "zero")
    centered = initial_state(problem, SchemeSpec("hcr", 0), "centered")
    assert np.all(zero.d == 0)
    assert centered.d[25] == pytest.approx((f0[26] - f0[24]) / 2)
    with pytest.raises(ConfigurationError):
        initial_state(problem, SchemeSpec("hcr", 0), "spline")


# ---------------------------------------------------------------- velocity shifting


def test_velocity_shift_requires_matching_m():
    grid = Grid1D(100)
    state = ConservedState(np.zeros(100), np.zeros(100))
    with pytest.raises(ConfigurationError):
        velocity_shift_run(state, 0.5, 10, 10, 0.1, grid, SchemeSpec("hcr", 1))


def test_velocity_shift_of_constant_is_constant():
    grid = Grid1D(100)
    state = ConservedState(np.full(100, 0.2), np.full(100, 0.2))
    out = velocity_shift_run(state, 0.5, 20, 100, 0.1, grid, SchemeSpec("hcr", 1))
    assert np.abs(out.f - 0.7).max() <= 1e-14


def test_velocity_shift_keeps_small_perturbation_in_place():
    # U = u + C self-advects about 5 cells in 100 steps; 5 index shifts undo it
    grid = Grid1D(100)
    rng = np.random.default_rng(2)
    bump = np.zeros(100)
    bump[40:50] = rng.uniform(0, 1e-3, 10)
    state = ConservedState(bump.copy(), bump.copy())
    out = velocity_shift_run(state, 0.5, 20, 100, 0.1, grid, SchemeSpec("hcr", 1))
    assert abs(int(np.argmax(out.rho)) - int(np.argmax(bump))) <= 1
    assert out.rho.sum() - 50.0 == pytest.approx(bump.sum(), abs=1e-12)


def test_velocity_shift_tracks_sign_changing_shock():
    # u0 changes sign, so shock tracking needs U = u + C to stay positive
    grid = Grid1D(100)
    dt, C, m, steps = 0.1, 0.5, 20, 600
    u0 = 0.1 + 0.3 * np.cos(2 * np.pi * grid.x / 100)
    spec = SchemeSpec("hcr", 1)
    rho0 = 0.5 * (u0 + np.roll(u0, -1))
    out = velocity_shift_run(ConservedState(u0.copy(), rho0), C, m, steps, dt, grid, spec)
    fine = Grid1D(500, 0.2)
    u = 0.1 + 0.3 * np.cos(2 * np.pi * fine.x / 100)
    for _ in range(steps * 5):
        u = godunov_oracle_step(u, dt / 5, fine)
    ref = shock_position(u, fine)
    shifted = shock_position(out.f - C, grid)
    assert abs(shifted - ref) <= 1.0

    state = ConservedState(u0.copy(), rho0.copy())
    for _ in range(steps):
        state = burgers_step(state, dt, grid, spec)
    unshifted = shock_position(state.f, grid)
    assert abs(shifted - ref) < abs(unshifted - ref)
