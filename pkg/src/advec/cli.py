"""Command-line runner: ``advec run``, ``advec matrix`` and ``advec verify``.

Outputs go under ``--out``, else ``$ADVEC_OUT``, else ``./advec_out``.
Exit codes: 0 success, 1 failed verification, 2 configuration error,
3 numerical guard (CFL) abort.
"""

from __future__ import annotations

import argparse
import csv
import json
import logging
import os
import sys
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, fields
from pathlib import Path

import numpy as np

from advec import diagnostics as dg
from advec.exceptions import CFLError, ConfigurationError
from advec.problems import (
    exact_linear_solution,
    init_custom,
    initial_state,
    load_problem,
    simulate,
)
from advec.schemes import ConservedState, NodalState, SchemeSpec

log = logging.getLogger("advec")

EXIT_OK, EXIT_VERIFY, EXIT_CONFIG, EXIT_GUARD = 0, 1, 2, 3

# triangle of Examples 2 and 4 before advection
TRIANGLE = (20, 41)

PROFILE_COLUMNS = ("index", "x", "f", "rho", "exact")
SERIES_COLUMNS = ("step", "time", "mass", "min_f", "max_f")
MATRIX_COLUMNS = ("problem", "scheme", "level", "steps", "conservative", "status", "l1_error",
                  "linf_error", "corner_max", "edge_min", "edge_max", "edge_monotone",
                  "mass_drift", "shock_position")


@dataclass
class RunConfig:
    problem: str = "example1"
    scheme: str = "hcr"
    level: int = 1
    steps: int | None = None
    n_cells: int | None = None
    cfl: float | None = None
    dt: float | None = None
    snapshots: tuple = ()
    d_init: str = "zero"
    output_dir: str | None = None
    seed: int = 0
    init_csv: str | None = None
    velocity: str = "1.0"
    bc: str = "periodic"

    @classmethod
    def from_file(cls, path, **overrides) -> RunConfig:
        """Read a flat ``key = value`` file; ``#`` starts a comment."""
        values = {}
        for lineno, raw in enumerate(Path(path).read_text().splitlines(), 1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise ConfigurationError(f"{path}:{lineno}: expected key = value")
            key, value = (part.strip() for part in line.split("=", 1))
            values[key] = value
        values.update({k: v for k, v in overrides.items() if v is not None})
        return cls.from_mapping(values)

    @classmethod
    def from_mapping(cls, values) -> RunConfig:
        known = {f.name: f for f in fields(cls)}
        kwargs = {}
        for key, value in values.items():
            if key not in known:
                raise ConfigurationError(f"unknown configuration key {key!r}")
            kwargs[key] = _coerce(key, value)
        return cls(**kwargs)

    def resolve(self):
        """Problem, scheme and initial state; raises ConfigurationError."""
        spec = SchemeSpec(self.scheme, int(self.level))
        if self.init_csv:
            problem, state = _problem_from_csv(self, spec)
        else:
            problem, _ = load_problem(self.problem)
            problem = problem.with_overrides(n_cells=self.n_cells, cfl=self.cfl, dt=self.dt,
                                             steps=self.steps)
            if problem.is_burgers and spec.replacement_level == 2:
                raise ConfigurationError("two-time replacement is only defined for linear advection")
            if spec.replacement_level == 2 and problem.grid.periodic:
                raise ConfigurationError("two-time replacement needs an open grid (use example4)")
            state = initial_state(problem, spec, self.d_init)
        if any(s > problem.steps for s in self.snapshots):
            raise ConfigurationError("snapshot steps exceed the run length")
        return problem, spec, state

    @property
    def label(self) -> str:
        name = "custom" if self.init_csv else self.problem
        return f"{name}_{self.scheme}_L{self.level}"


def _coerce(key, value):
    if value is None:
        return None
    if key in ("level", "seed"):
        return int(value)
    if key in ("steps", "n_cells"):
        return None if value in ("", "none") else int(value)
    if key in ("cfl", "dt"):
        return None if value in ("", "none") else float(value)
    if key == "snapshots":
        if isinstance(value, (list, tuple)):
            return tuple(int(v) for v in value)
        return tuple(int(v) for v in str(value).replace(",", " ").split())
    return str(value)


def _problem_from_csv(config: RunConfig, spec: SchemeSpec):
    rows = list(csv.DictReader(Path(config.init_csv).open(newline="")))
    if len(rows) < 3:
        raise ConfigurationError(f"{config.init_csv}: need at least 3 rows")
    x = np.array([float(r["x"]) for r in rows])
    f = np.array([float(r["f"]) for r in rows])
    h = float(x[1] - x[0])
    u = "self" if config.velocity == "self" else float(config.velocity)
    dt = config.dt
    if dt is None:
        if u == "self":
            raise ConfigurationError("Burgers' runs from CSV need dt")
        dt = (config.cfl if config.cfl is not None else 0.2) * h / abs(u)
    problem, _ = init_custom(f, h=h, bc=config.bc, dt=dt, u=u, steps=config.steps or 0, x0=float(x[0]))
    have_rho = all(r.get("rho", "") != "" for r in rows)
    if spec.replacement_level == 1 and have_rho:
        state = ConservedState(f, np.array([float(r["rho"]) for r in rows]))
    else:
        state = initial_state(problem, spec, config.d_init, f0=f)
    return problem, state


def _fmt(value) -> str:
    if value is None:
        return ""
    return repr(float(value))


def _write_profile(path, problem, state, exact):
    x = problem.grid.x
    rho = state.rho if isinstance(state, ConservedState) else None
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(PROFILE_COLUMNS)
        for i in range(x.size):
            w.writerow([i, _fmt(x[i]), _fmt(state.f[i]),
                        "" if rho is None else _fmt(rho[i]),
                        "" if exact is None else _fmt(exact[i])])


def _write_series(path, problem, record):
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(SERIES_COLUMNS)
        for n, (mass, (lo, hi)) in enumerate(zip(record.mass_series, record.extrema_series)):
            w.writerow([n, _fmt(n * problem.dt), _fmt(mass), _fmt(lo), _fmt(hi)])


def _displacement(problem, steps):
    if problem.is_burgers:
        return None
    cells = problem.velocity.u0 * problem.dt * steps / problem.grid.h
    return int(round(cells)) if abs(cells - round(cells)) < 1e-9 else None


def compute_metrics(problem, spec, record, state, steps):
    metrics = dict.fromkeys(("table1_window", "corner_max", "l1_error", "linf_error",
                             "shock_position"))
    metrics.update(problem=problem.name, scheme=spec.kind, level=spec.replacement_level,
                   steps=steps, mass_drift=record.mass_drift(), status="ok")
    shift = _displacement(problem, steps)
    if not problem.is_burgers:
        exact = exact_linear_solution(problem, steps)
        metrics["l1_error"], metrics["linf_error"] = dg.error_norms(state.f, exact)
    else:
        metrics["shock_position"] = dg.shock_position(state.f, problem.grid)
    if problem.name == "example1" and shift is not None:
        metrics["table1_window"] = [float(v) for v in dg.edge_window(state.f, shift)]
    if problem.name in ("example2", "example4") and shift is not None:
        lo, hi = TRIANGLE[0] + shift, TRIANGLE[1] + shift
        idx = np.arange(lo, hi) % problem.grid.n_cells
        metrics["corner_max"] = float(state.f[idx].max())
    return metrics


def out_root(config_dir=None) -> Path:
    return Path(config_dir or os.environ.get("ADVEC_OUT") or "advec_out")


def run(config: RunConfig, out_dir=None):
    """Execute one configuration and write its files.

    Returns ``(record, metrics)``.  Configuration errors are raised before
    anything is stepped; a CFL abort writes the partial history and an
    ``error`` entry in ``metrics.json`` before re-raising.
    """
    problem, spec, state = config.resolve()
    steps = problem.steps
    target = Path(out_dir) if out_dir else out_root(config.output_dir) / config.label
    target.mkdir(parents=True, exist_ok=True)
    snaps = sorted(set(config.snapshots))
    try:
        record, final = simulate(problem, spec, steps, snaps, config.d_init, state=state)
    except CFLError as err:
        record = err.record
        _write_series(target / "series.csv", problem, record)
        metrics = {"problem": problem.name, "scheme": spec.kind, "level": spec.replacement_level,
                   "steps": steps, "status": "error", "error": str(err),
                   "failed_step": err.step}
        (target / "metrics.json").write_text(json.dumps(metrics, indent=2) + "\n")
        raise
    exact = None if problem.is_burgers else exact_linear_solution(problem, steps)
    _write_profile(target / "profile.csv", problem, final, exact)
    for n in snaps:
        snap_exact = None if problem.is_burgers else exact_linear_solution(problem, n)
        snap_state = NodalState(record.snapshots[n], np.zeros(problem.grid.n_cells))
        _write_profile(target / f"profile_{n:06d}.csv", problem, snap_state, snap_exact)
    _write_series(target / "series.csv", problem, record)
    metrics = compute_metrics(problem, spec, record, final, steps)
    record.metrics = metrics
    (target / "metrics.json").write_text(json.dumps(metrics, indent=2) + "\n")
    log.info("%s: %d steps written to %s", config.label, steps, target)
    return record, metrics


def _matrix_row(config: RunConfig, out_dir):
    row = dict.fromkeys(MATRIX_COLUMNS)
    row.update(problem=config.problem, scheme=config.scheme, level=config.level,
               conservative=int(config.level) >= 1)
    try:
        _, metrics = run(config, out_dir)
    except (ConfigurationError, CFLError) as err:
        row.update(status="error: " + str(err))
        return row
    row.update(status="ok", steps=metrics["steps"], l1_error=metrics["l1_error"],
               linf_error=metrics["linf_error"], corner_max=metrics["corner_max"],
               mass_drift=metrics["mass_drift"], shock_position=metrics["shock_position"])
    window = metrics["table1_window"]
    if window is not None:
        row.update(edge_min=min(window), edge_max=max(window),
                   edge_monotone=dg.monotone_edge_check(window))
    return row


def run_matrix(configs, out_dir=None, jobs=1):
    """Run every configuration and write ``comparison.csv``.

    Failures are recorded per row and do not stop the matrix.
    """
    configs = list(configs)
    if not configs:
        raise ConfigurationError("matrix needs at least one configuration")
    root = Path(out_dir) if out_dir else out_root(configs[0].output_dir)
    root.mkdir(parents=True, exist_ok=True)
    targets = [root / f"{i:03d}_{c.label}" for i, c in enumerate(configs)]
    if jobs > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            rows = list(pool.map(_matrix_row, configs, targets))
    else:
        rows = [_matrix_row(c, t) for c, t in zip(configs, targets)]
    with open(root / "comparison.csv", "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(MATRIX_COLUMNS)
        for row in rows:
            w.writerow(["" if row[c] is None else
                        (_fmt(row[c]) if isinstance(row[c], float) else row[c])
                        for c in MATRIX_COLUMNS])
    return rows


def _add_run_options(p):
    p.add_argument("--config", help="flat key = value configuration file")
    p.add_argument("--problem", help="example1, example2, example3_burgers or example4")
    p.add_argument("--steps", type=int)
    p.add_argument("--cells", dest="n_cells", type=int)
    group = p.add_mutually_exclusive_group()
    group.add_argument("--cfl", type=float)
    group.add_argument("--dt", type=float)
    p.add_argument("--d-init", dest="d_init", choices=("zero", "centered"))
    p.add_argument("--init-csv", dest="init_csv", help="start from a profile.csv")
    p.add_argument("--velocity", help="constant speed or 'self' (custom CSV runs)")
    p.add_argument("--bc", choices=("periodic", "open"))
    p.add_argument("--seed", type=int)
    p.add_argument("--out", dest="output_dir")


def build_parser():
    parser = argparse.ArgumentParser(prog="advec", description=__doc__.splitlines()[0])
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    p_run = sub.add_parser("run", help="run one scheme on one problem")
    _add_run_options(p_run)
    p_run.add_argument("--scheme")
    p_run.add_argument("--level", type=int)
    p_run.add_argument("--snapshots", help="comma-separated step indices")

    p_mat = sub.add_parser("matrix", help="run a scheme x level matrix")
    _add_run_options(p_mat)
    p_mat.add_argument("--schemes", default="hcr,cubic,rational,modified_rational")
    p_mat.add_argument("--levels", default="1")
    p_mat.add_argument("--jobs", type=int, default=1)
    p_mat.add_argument("--configs", nargs="*", default=(), help="extra configuration files")

    sub.add_parser("verify", help="run the acceptance checks")
    return parser


def _config_from_args(args, **extra):
    keys = ("problem", "steps", "n_cells", "cfl", "dt", "d_init", "init_csv", "velocity", "bc",
            "seed", "output_dir", "scheme", "level", "snapshots")
    overrides = {k: getattr(args, k, None) for k in keys}
    overrides.update(extra)
    overrides = {k: v for k, v in overrides.items() if v is not None}
    if args.config:
        return RunConfig.from_file(args.config, **overrides)
    return RunConfig.from_mapping(overrides)


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(message)s")
    try:
        if args.command == "verify":
            from advec.acceptance import run_all

            results = run_all()
            return EXIT_OK if all(r.passed for r in results) else EXIT_VERIFY
        if args.command == "run":
            config = _config_from_args(args)
            _, metrics = run(config)
            print(json.dumps(metrics))
            return EXIT_OK
        configs = [RunConfig.from_file(path) for path in args.configs]
        for level in args.levels.split(","):
            for scheme in args.schemes.split(","):
                configs.append(_config_from_args(args, scheme=scheme.strip(), level=int(level)))
        rows = run_matrix(configs, jobs=args.jobs, out_dir=configs[0].output_dir)
        for row in rows:
            print(f"{row['scheme']:>18} L{row['level']} {row['status']}")
        return EXIT_OK
    except ConfigurationError as err:
        print(f"configuration error: {err}", file=sys.stderr)
        return EXIT_CONFIG
    except CFLError as err:
        print(f"numerical guard: {err}", file=sys.stderr)
        return EXIT_GUARD


if __name__ == "__main__":
    sys.exit(main())
