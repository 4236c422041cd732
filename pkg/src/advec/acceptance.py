"""Exit criteria for the package, runnable from ``advec verify`` or pytest.

Each ``check_*`` function runs one criterion at its fixed tolerance and
returns a :class:`CheckResult`.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy import integrate

from advec import diagnostics as dg
from advec.interpolants import (
    CellData,
    cell_outflux,
    csl2_coefficients,
    cubic_coefficients,
    hcr_deriv,
    hcr_eval,
    hcr_params,
)
from advec.problems import (
    init_burgers,
    init_example1,
    init_example2,
    init_example4,
    reference_burgers,
    simulate,
)
from advec.schemes import (
    ConservedState,
    Grid1D,
    SchemeSpec,
    VelocityField,
    step_conservative,
    step_csl2_direct,
)

# reference edge values (rows 4..16), one column per scheme
TABLE1 = {
    "hcr": [0, 0, 0, -0.000001, -0.000044, -0.001716, -0.052075, -0.305191, -0.681895,
            -0.954887, -0.999656, -0.999996, -0.999997],
    "cubic": [-0.000014, -0.000986, -0.001887, 0.004413, 0.024674, 0.032729, -0.052964,
              -0.304522, -0.665011, -0.955764, -1.058063, -1.029841, -0.999959],
    "rational": [0, -0.000004, -0.000037, -0.000345, -0.002738, -0.018069, -0.09232, -0.32068,
                 -0.67146, -0.90682, -0.982846, -0.997188, -0.998634],
    "modified_rational": [0, 0, 0.000019, 0.000223, 0.000387, -0.000109, -0.04052, -0.277075,
                          -0.647653, -0.951461, -1.059713, -1.031324, -1.000665],
}
TABLE1_ROWS = list(range(4, 17))
TABLE1_TOL = 1e-3
TABLE1_STRETCH = 5e-6

# reference triangle-corner maxima: (value, tolerance)
CORNER_MAXIMA = {
    ("hcr", 1): (0.935, 0.002),
    ("rational", 1): (0.916, 0.002),
    ("hcr", 0): (0.937, 0.005),
    ("rational", 0): (0.923, 0.005),
}
# advected image of the triangle 20 <= x < 41 after 88 cells
CORNER_REGION = (108, 129)

LINEAR_KINDS = ("hcr", "cubic", "rational", "modified_rational")
ALL_KINDS = LINEAR_KINDS + ("csl2_direct",)


@dataclass
class CheckResult:
    name: str
    passed: bool
    detail: str

    def line(self) -> str:
        return f"[{'PASS' if self.passed else 'FAIL'}] {self.name}: {self.detail}"


def _example1_window(kind):
    problem, _ = init_example1()
    _, state = simulate(problem, SchemeSpec(kind, 1), steps=200)
    return dg.edge_window(state.f, problem.cfl * 200)


def check_table1() -> CheckResult:
    worst = {}
    for kind, column in TABLE1.items():
        worst[kind] = float(np.max(np.abs(_example1_window(kind) - np.array(column))))
    err = max(worst.values())
    stretch = "met" if err <= TABLE1_STRETCH else "missed"
    detail = ", ".join(f"{k} {v:.1e}" for k, v in worst.items())
    return CheckResult("table1", err <= TABLE1_TOL,
                       f"max |diff| {err:.2e} (tol {TABLE1_TOL:g}, stretch {TABLE1_STRETCH:g} {stretch}); {detail}")


def check_corner_maxima() -> CheckResult:
    problem, _ = init_example2()
    parts, ok = [], True
    for (kind, level), (target, tol) in CORNER_MAXIMA.items():
        _, state = simulate(problem, SchemeSpec(kind, level), d_init="zero")
        value = dg.corner_max(state.f, CORNER_REGION)
        good = abs(value - target) <= tol
        ok &= good
        parts.append(f"{kind}/L{level} {value:.4f} vs {target}+-{tol}")
    return CheckResult("corner_maxima", ok, "; ".join(parts))


def check_convexity_dichotomy() -> CheckResult:
    expected = {"hcr": True, "rational": True, "cubic": False, "modified_rational": False}
    got = {k: dg.monotone_edge_check(_example1_window(k)) for k in expected}
    ok = got == expected
    return CheckResult("convexity_dichotomy", ok,
                       ", ".join(f"{k} monotone={v}" for k, v in got.items()))


def check_mass_conservation(steps=2000) -> CheckResult:
    worst = 0.0
    failures = []
    problems = [init_example1()[0], init_example2()[0], init_burgers()[0]]
    for problem in problems:
        for kind in ALL_KINDS:
            record, _ = simulate(problem, SchemeSpec(kind, 1), steps=steps)
            m0 = record.mass_series[0]
            drift = np.max(np.abs(np.array(record.mass_series) - m0))
            if m0 == 0:
                tol = 1e-12 * problem.grid.n_cells * problem.grid.h
                rel = drift / tol * 1e-10
            else:
                rel = drift / abs(m0)
                tol = 1e-10 * abs(m0)
            worst = max(worst, rel)
            if drift > tol:
                failures.append(f"{problem.name}/{kind} drift {drift:.2e}")
    detail = f"worst relative drift {worst:.2e} (tol 1e-10)"
    if failures:
        detail += "; " + ", ".join(failures)
    return CheckResult("mass_conservation", not failures, detail)


def check_path_equivalence(n_states=100, n_steps=10, seed=0) -> CheckResult:
    rng = np.random.default_rng(seed)
    worst = 0.0
    cubic = SchemeSpec("cubic", 1)
    for _ in range(n_states):
        n = int(rng.integers(8, 64))
        grid = Grid1D(n, float(rng.uniform(0.5, 2.0)))
        u = float(rng.uniform(-1, 1))
        dt = float(rng.uniform(0, 1)) * grid.h / abs(u)
        vel = VelocityField("constant", u)
        a = ConservedState(rng.uniform(-1, 1, n), rng.uniform(-1, 1, n))
        b = a.copy()
        for _ in range(n_steps):
            a = step_conservative(a, vel, dt, grid, cubic)
            b = step_csl2_direct(b, vel, dt, grid)
            worst = max(worst, np.max(np.abs(a.f - b.f)), np.max(np.abs(a.rho - b.rho)))
    return CheckResult("path_equivalence", worst <= 1e-13, f"max entry difference {worst:.2e} (tol 1e-13)")


def check_burgers_oscillation() -> CheckResult:
    problem, _ = init_burgers()
    rec_hcr, _ = simulate(problem, SchemeSpec("hcr", 1))
    rec_csl, _ = simulate(problem, SchemeSpec("csl2_direct", 1))
    ext = np.array(rec_hcr.extrema_series)
    lo, hi = float(ext[:, 0].min()), float(ext[:, 1].max())
    csl_max = max(mx for _, mx in rec_csl.extrema_series)
    ok = lo >= 0.1 - 1e-6 and hi <= 0.9 + 1e-6 and csl_max > 0.905
    return CheckResult("burgers_oscillation", ok,
                       f"HCR range [{lo:.7f}, {hi:.7f}]; CSL2 max {csl_max:.4f} (needs > 0.905)")


def check_burgers_shock() -> CheckResult:
    problem, _ = init_burgers()
    x, u_ref = reference_burgers(100.0, 5)
    fine = Grid1D(x.size, x[1] - x[0])
    ref = dg.shock_position(u_ref, fine)
    length = problem.grid.n_cells * problem.grid.h
    dist = {}
    for kind, level in (("hcr", 1), ("csl2_direct", 1), ("hcr", 0)):
        _, state = simulate(problem, SchemeSpec(kind, level), d_init="centered")
        dist[(kind, level)] = dg.periodic_distance(dg.shock_position(state.f, problem.grid), ref, length)
    h = problem.grid.h
    ok = dist[("hcr", 1)] <= 2 * h and dist[("csl2_direct", 1)] <= 2 * h and dist[("hcr", 0)] > 3 * h
    detail = f"reference x={ref:.3f}; " + ", ".join(f"{k}/L{l} off {d:.3f}" for (k, l), d in dist.items())
    return CheckResult("burgers_shock", ok, detail)


def check_interpolant_properties(n_cells=10_000, seed=0) -> CheckResult:
    rng = np.random.default_rng(seed)
    problems = []
    n = n_cells
    h = rng.choice([-1.0, 1.0], n) * rng.uniform(0.1, 2.0, n)
    f_lo = rng.uniform(-1, 1, n)
    d_lo = rng.uniform(-2, 2, n)
    P = rng.uniform(1e-3, 1.0, n)
    Q = rng.uniform(1e-3, 1.0, n)
    # concave in k where P, Q > 0; mirrored data with both negative
    sign = rng.choice([-1.0, 1.0], n)
    P, Q = sign * P, sign * Q
    S = d_lo + P / h
    d_up = S + Q / h
    cell = CellData(f_lo, f_lo + S * h, d_lo, d_up, h)
    p = hcr_params(cell)
    scale = 1 + np.abs(cell.f_up) + np.abs(cell.d_up) * np.abs(h)

    # endpoints
    e = max(np.max(np.abs(hcr_eval(p, 0.0) - f_lo) / scale),
            np.max(np.abs(hcr_eval(p, 1.0) - cell.f_up) / scale),
            np.max(np.abs(hcr_deriv(p, 0.0) - d_lo) * np.abs(h) / scale),
            np.max(np.abs(hcr_deriv(p, 1.0) - d_up) * np.abs(h) / scale))
    if e > 1e-12:
        problems.append(f"endpoint error {e:.1e}")

    # alpha limits
    ks = np.linspace(0, 1, 101)[:, None]
    c2, c3 = cubic_coefficients(cell)
    p0 = hcr_params(cell, alpha=0.0)
    p1 = hcr_params(cell, alpha=1.0)
    xi = ks * h
    cub_v = f_lo + d_lo * xi + c2 * xi**2 + c3 * xi**3
    cub_d = d_lo + 2 * c2 * xi + 3 * c3 * xi**2
    B = Q + (P - Q) * ks
    rat_v = f_lo + d_lo * h * ks + P**2 * ks**2 / B
    e0 = max(np.max(np.abs(hcr_eval(p0, ks) - cub_v)),
             np.max(np.abs(hcr_deriv(p0, ks) - cub_d) * np.abs(h)))
    e1 = np.max(np.abs(hcr_eval(p1, ks) - rat_v))
    if e0 > 1e-13 or e1 > 1e-13:
        problems.append(f"alpha limits {e0:.1e}/{e1:.1e}")

    # convexity: centred second difference in k keeps the sign of P
    dk = 1e-4
    kk = np.arange(1, 100)[:, None] / 100.0
    second = hcr_eval(p, kk + dk) - 2 * hcr_eval(p, kk) + hcr_eval(p, kk - dk)
    bad = int(np.sum(np.sign(second) != sign))
    if bad:
        problems.append(f"{bad} convexity violations")

    # outflux against adaptive quadrature
    worst_q = 0.0
    for _ in range(200):
        fl, fu, rho = rng.uniform(-1, 1, 3)
        hs = float(rng.choice([-1.0, 1.0]) * rng.uniform(0.1, 2.0))
        c = csl2_coefficients(fl, fu, rho, hs)
        x_end = float(rng.uniform(-1, 1)) * abs(hs) * np.sign(hs)
        ref, _ = integrate.quad(lambda x: fl + 2 * c.q1 * x + 3 * c.q2 * x * x, 0.0, x_end,
                                limit=100)
        worst_q = max(worst_q, abs(cell_outflux(c, x_end) - ref))
    if worst_q > 1e-12:
        problems.append(f"outflux error {worst_q:.1e}")
    detail = "; ".join(problems) if problems else (
        f"endpoints {e:.1e}, alpha limits {e0:.1e}/{e1:.1e}, {n} cells convex, outflux {worst_q:.1e}")
    return CheckResult("interpolant_properties", not problems, detail)


def check_double_replacement() -> CheckResult:
    problem, _ = init_example4()
    _, cip1 = simulate(problem, SchemeSpec("cubic", 1))
    _, cip2 = simulate(problem, SchemeSpec("cubic", 2))
    _, hcr2 = simulate(problem, SchemeSpec("hcr", 2))
    gap = float(np.max(np.abs(cip1.f - cip2.f)))
    # the square wave sits at 148..167 after 88 cells
    overshoot = float(hcr2.f[140:176].max()) - 1.0
    ok = gap <= 0.05 and overshoot > 0.01
    return CheckResult("double_replacement", ok,
                       f"CIP L2 vs L1 Linf {gap:.4f} (tol 0.05); HCR L2 overshoot {overshoot:.4f} (needs > 0.01)")


CHECKS = (
    check_table1,
    check_corner_maxima,
    check_convexity_dichotomy,
    check_mass_conservation,
    check_path_equivalence,
    check_burgers_oscillation,
    check_burgers_shock,
    check_interpolant_properties,
    check_double_replacement,
)


def run_all(echo=print):
    results = []
    for check in CHECKS:
        result = check()
        results.append(result)
        if echo is not None:
            echo(result.line())
    return results
