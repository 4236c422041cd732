import numpy as np
import pytest

from advec.acceptance import TABLE1
from advec.diagnostics import (
    RunRecord,
    corner_max,
    edge_window,
    error_norms,
    monotone_edge_check,
    periodic_distance,
    shock_position,
    total_mass,
)
from advec.exceptions import ConfigurationError
from advec.problems import exact_linear_solution, init_example1
from advec.schemes import ConservedState, Grid1D, NodalState


def test_total_mass_examples():
    _, f0 = init_example1()
    grid = Grid1D(100)
    assert total_mass(NodalState(f0, np.zeros(100)), grid) == 0.0
    assert total_mass(ConservedState(np.full(100, 3.0), np.full(100, 3.0)), Grid1D(100, 0.5)) == 150.0
    u0 = 0.5 + 0.4 * np.cos(2 * np.pi * grid.x / 100)
    assert total_mass(ConservedState(u0, u0), grid) == pytest.approx(50.0, abs=1e-12)


def test_edge_window_on_exact_solution():
    problem, _ = init_example1()
    exact = exact_linear_solution(problem, 200)
    w = edge_window(exact, 40)
    assert w.size == 13
    assert list(w) == [0.0] * 8 + [-1.0] * 5


def test_edge_window_wraps_periodically():
    profile = np.arange(20.0)
    assert list(edge_window(profile, 0, edge_index=2)) == [14, 15, 16, 17, 18, 19, 0, 1, 2, 3, 4, 5, 6]


def test_edge_window_rejects_fractional_displacement():
    with pytest.raises(ConfigurationError):
        edge_window(np.zeros(100), 40.5)


def test_corner_max():
    profile = np.arange(10.0)
    assert corner_max(profile, (2, 5)) == 4.0
    assert corner_max(profile, slice(0, 3)) == 2.0
    with pytest.raises(ConfigurationError):
        corner_max(profile, (5, 20))


@pytest.mark.parametrize("kind, expected", [
    ("hcr", True), ("rational", True), ("cubic", False), ("modified_rational", False),
])
def test_monotone_check_on_reference_columns(kind, expected):
    assert monotone_edge_check(TABLE1[kind]) is expected


def test_monotone_check_directions():
    assert monotone_edge_check([0, 0.2, 1], "increasing", bounds=(0, 1))
    assert not monotone_edge_check([0, 0.2, 1.1], "increasing", bounds=(0, 1))
    with pytest.raises(ConfigurationError):
        monotone_edge_check([0, 1], "sideways")


def test_error_norms():
    l1, linf = error_norms([1.0, 2.0, 3.0, 4.0], [1.0, 2.5, 3.0, 3.0])
    assert l1 == pytest.approx(0.375) and linf == 1.0
    with pytest.raises(ConfigurationError):
        error_norms(np.zeros((2, 2)), np.zeros((2, 2)))


def test_shock_position_synthetic():
    grid = Grid1D(100)
    u = np.where(np.arange(100) <= 40, 0.9, 0.1)
    assert shock_position(u, grid) == pytest.approx(40.5)


def test_shock_position_smeared_front():
    grid = Grid1D(100)
    u = np.full(100, 0.1)
    u[:30] = 0.9
    u[30], u[31] = 0.7, 0.3
    assert shock_position(u, grid) == pytest.approx(30.5)


def test_shock_position_needs_a_drop():
    with pytest.raises(ConfigurationError):
        shock_position(np.ones(10), Grid1D(10))


def test_periodic_distance():
    assert periodic_distance(1.0, 99.0, 100.0) == pytest.approx(2.0)
    assert periodic_distance(30.0, 10.0, 100.0) == pytest.approx(20.0)


def test_run_record():
    grid = Grid1D(4)
    rec = RunRecord()
    rec.observe(ConservedState(np.ones(4), np.ones(4)), grid)
    rec.observe(ConservedState(np.ones(4), np.array([1.0, 1.0, 1.0, 1.5])), grid)
    assert rec.steps == 1
    assert rec.mass_drift() == pytest.approx(0.5)
    assert rec.extrema_series[0] == (1.0, 1.0)
