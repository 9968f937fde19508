"""Command-line front end: ``run <scenario>``, ``tables bessel`` and ``version``.

Exit codes: 0 success, 1 a task failed, 2 the scenario did not parse,
3 the scenario did not validate.  Outputs go to ``$MINISUPERSPACE_OUTPUT``
(default ``./runs``) under the scenario name.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import os
import sys
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Callable

import numpy as np

from . import __version__
from .canonical import (
    TimeCandidate,
    factorize_constraint,
    intrinsic_time_check,
    sample_on_constraint,
)
from .errors import MinisuperspaceError, ScenarioParseError, ScenarioValidationError
from .fourier import generalized_fourier, taub_sinh_kernel
from .grids import Grid1D, GridWavefunction
from .hj import action_endpoint_difference, conserved_observables, hj_complete_solution
from .model import PhaseState, integrate_trajectory, motion_reverse_trajectory, solve_momentum_on_constraint, taub_reduced_model
from .modes import mode_on_grid, observed_orders, wdw_convergence
from .quantum import QuantumSheet, gaussian_bump, norm_drift, ordering_check, reduced_spectrum, schrodinger_evolve
from .scenario import Scenario, TaskSpec, bundled_scenarios, load_scenario
from .special import bessel_table, mod_bessel_I_imag
from .symmetry import SheetLabel, clock_reversal, evolve_to_grid, motion_reversal, sheet_residual

OUTPUT_ENV = "MINISUPERSPACE_OUTPUT"
EXIT_OK, EXIT_TASK_FAILED, EXIT_PARSE, EXIT_VALIDATION = 0, 1, 2, 3


# -- report -------------------------------------------------------------------------


@dataclass
class TaskResult:
    name: str
    kind: str
    status: str = "ok"
    error: str | None = None
    message: str | None = None
    metrics: dict[str, Any] = field(default_factory=dict)
    checks: list[dict[str, Any]] = field(default_factory=list)
    files: list[str] = field(default_factory=list)
    plots: list[dict[str, str]] = field(default_factory=list)
    seconds: float = 0.0

    def check(self, name: str, value: float, tolerance: float, passed: bool | None = None, relation: str = "<"):
        ok = bool(value < tolerance) if passed is None else bool(passed)
        self.checks.append({"name": name, "value": value, "tolerance": tolerance, "relation": relation, "passed": ok})
        if not ok and self.status == "ok":
            self.status = "failed"

    def to_dict(self) -> dict:
        d = {k: v for k, v in self.__dict__.items() if k != "seconds"}
        return _plain(d)


@dataclass
class RunReport:
    scenario: str
    seed: int
    output_dir: Path
    tasks: list[TaskResult] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return all(t.status == "ok" for t in self.tasks)

    def to_dict(self) -> dict:
        return {
            "scenario": self.scenario,
            "seed": self.seed,
            "status": "ok" if self.ok else "failed",
            "tasks": [t.to_dict() for t in self.tasks],
        }


def _plain(x):
    """JSON-ready copy: numpy scalars to Python, complex to [re, im], non-finite to strings."""
    if isinstance(x, dict):
        return {str(k): _plain(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_plain(v) for v in x]
    if isinstance(x, np.ndarray):
        return _plain(x.tolist())
    if isinstance(x, (bool, np.bool_)):
        return bool(x)
    if isinstance(x, (int, np.integer)):
        return int(x)
    if isinstance(x, (complex, np.complexfloating)):
        return [_plain(float(x.real)), _plain(float(x.imag))]
    if isinstance(x, (float, np.floating)):
        x = float(x)
        return x if math.isfinite(x) else repr(x)
    if isinstance(x, Path):
        return str(x)
    return x


def _write_json(path: Path, data) -> None:
    path.write_text(json.dumps(_plain(data), indent=2, sort_keys=True) + "\n", encoding="utf-8")


def _write_rows(path: Path, header, rows) -> None:
    with path.open("w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        for r in rows:
            w.writerow([repr(float(v)) for v in r])


# -- task context and helpers ----------------------------------------------------------


@dataclass
class TaskContext:
    scenario: Scenario
    outdir: Path
    result: TaskResult

    @property
    def model(self):
        return self.scenario.model.build()

    @property
    def seed(self) -> int:
        return self.scenario.seed

    def path(self, suffix: str) -> Path:
        name = f"{self.result.name}{suffix}"
        self.result.files.append(name)
        return self.outdir / name

    def plot(self, kind: str, file: str, title: str) -> None:
        self.result.plots.append({"type": kind, "data": file, "title": title})


def _grid(spec, label: str) -> Grid1D:
    lo, hi, n = spec
    return Grid1D(float(lo), float(hi), int(n), label)


def _complex(v) -> complex:
    if isinstance(v, (list, tuple)):
        return complex(float(v[0]), float(v[1]))
    return complex(v)


def _candidate(model, spec: dict, scenario: Scenario) -> TimeCandidate:
    sign = int(spec.get("sign", 1))
    if spec.get("type", "intrinsic") == "taub_s":
        lam = abs(scenario.model.constants["lam"])
        return TimeCandidate.taub_s(lam, int(spec.get("branch", 1)), sign)
    axis = model.axis(spec["axis"])
    return TimeCandidate.intrinsic(axis, sign, f"{'+' if sign > 0 else '-'}{model.coordinate_labels[axis]}")


def _mode_params(scenario: Scenario) -> dict:
    c = scenario.model.constants
    return {"cbar": c["cbar"], "lam": c["lam"]} if scenario.model.case == "taub" else {"zeta": c["zeta"]}


def _sheet(ctx: TaskContext, p: dict) -> tuple[QuantumSheet, Grid1D]:
    model = ctx.model
    if ctx.scenario.model.case == "taub":
        # stationary sheets of the reduced (Omega, s) constraint, clock s
        model = taub_reduced_model(ctx.scenario.model.constants["cbar"])
    clock = p.get("clock", model.coordinate_labels[1])
    space_axis = 1 - model.axis(clock)
    grid = _grid(p.get("grid", [-8.0, 8.0, 160]), model.coordinate_labels[space_axis])
    plus, minus = factorize_constraint(model, clock, int(p.get("plus_clock_sign", 1)))
    sheet = plus if int(p.get("sheet", 1)) > 0 else minus
    return QuantumSheet.from_sheet(sheet, grid, order=int(p.get("order", 4))), grid


def _packet(grid: Grid1D, p: dict) -> GridWavefunction:
    x = grid.points
    c, w, k = float(p.get("center", 0.0)), float(p.get("width", 1.0)), float(p.get("momentum", 0.0))
    psi = GridWavefunction((grid,), np.exp(-0.5 * ((x - c) / w) ** 2 + 1j * k * x))
    return psi.normalized()


# -- tasks ------------------------------------------------------------------------------


def task_trajectory(ctx: TaskContext, p: dict) -> None:
    model = ctx.model
    bound = float(p.get("drift_bound", 1e-6))
    states = sample_on_constraint(
        model, int(p.get("samples", 1)), p.get("solve_axis", 0), int(p.get("root", 1)),
        tuple(p.get("q_box", (-1.0, 1.0))), tuple(p.get("p_box", (-1.0, 1.0))), seed=ctx.seed,
    )
    clock = _candidate(model, p["clock"], ctx.scenario) if "clock" in p else None
    drifts, trips, monotone = [], [], []
    for k, s in enumerate(states):
        tr = integrate_trajectory(
            model, s, float(p.get("lapse", 1.0)), int(p.get("steps", 1000)), float(p.get("dt", 1e-3)),
            bound, p.get("method", "verlet"),
        )
        path = ctx.path(f"_{k}.csv")
        tr.write_csv(path)
        ctx.plot("trajectory", path.name, f"trajectory {k}")
        back = motion_reverse_trajectory(tr, bound)
        trips.append(max(np.max(np.abs(back.qs[-1] - tr.qs[0])), np.max(np.abs(back.ps[-1] + tr.ps[0]))))
        drifts.append(tr.max_drift)
        if clock is not None:
            f = clock.as_function()
            steps = np.diff([f(q, pp) for q, pp in zip(tr.qs, tr.ps)])
            monotone.append(bool(np.all(steps > 0) or np.all(steps < 0)))
    r = ctx.result
    r.metrics.update(max_drift=max(drifts), roundtrip=trips, drifts=drifts)
    r.check("constraint_drift", max(drifts), bound)
    for k, (d, t) in enumerate(zip(drifts, trips)):
        r.check(f"reversal_roundtrip_{k}", t, 10.0 * max(d, 1e-14), relation="<= 10 x drift")
    if clock is not None:
        r.metrics["clock"] = clock.name
        r.check("clock_monotone", float(sum(not m for m in monotone)), 0.5, relation="violations")


def task_time_check(ctx: TaskContext, p: dict) -> None:
    model = ctx.model
    n = int(p.get("samples", 200))
    verdicts = []
    for spec in p.get("candidates", []):
        states = sample_on_constraint(
            model, n, spec.get("solve_axis", p.get("solve_axis", 0)), int(spec.get("root", p.get("root", 1))),
            tuple(p.get("q_box", (-1.0, 1.0))), tuple(p.get("p_box", (-2.0, 2.0))), seed=ctx.seed,
        )
        cand = _candidate(model, spec, ctx.scenario)
        v = intrinsic_time_check(model, cand, states, float(p.get("margin", 1e-6)))
        entry = v.to_dict(include_samples=False)
        verdicts.append(entry)
        ctx.result.metrics[cand.name] = v.verdict
        if "expect" in spec:
            want = spec["expect"] == "global"
            ctx.result.check(f"{cand.name}_verdict", float(v.is_global), 0.0, passed=v.is_global == want, relation=spec["expect"])
    _write_json(ctx.path(".json"), verdicts)


def task_wdw_modes(ctx: TaskContext, p: dict) -> None:
    scen = ctx.scenario
    case, params = scen.model.mode_case, _mode_params(scen)
    default = {"a": 1.0, "d": 1.0} if case == "taub" else {"a+": 1.0, "b-": 1.0}
    coeffs = {k: _complex(v) for k, v in p.get("coefficients", default).items()}
    omega = float(p["omega"])
    labels = ctx.model.coordinate_labels
    grids = [_grid(g, labels[i]) for i, g in enumerate(p.get("grids", [[-1.0, 1.0, 32], [-1.0, 1.0, 32]]))]
    res = wdw_convergence(lambda g: mode_on_grid(case, omega, coeffs, params, g), ctx.model, grids, int(p.get("refinements", 2)))
    orders = observed_orders(res)
    path = ctx.path("_convergence.csv")
    spacings = [grids[0].spacing / 2**k for k in range(len(res.history))]
    _write_rows(path, ["spacing", "residual"], zip(spacings, res.history))
    ctx.plot("loglog", path.name, "residual vs spacing")
    psi = mode_on_grid(case, omega, coeffs, params, grids)
    mpath = ctx.path("_density.csv")
    Q0, Q1 = np.meshgrid(grids[0].points, grids[1].points, indexing="ij")
    _write_rows(mpath, [labels[0], labels[1], "abs2"], zip(Q0.ravel(), Q1.ravel(), np.abs(psi.values.ravel()) ** 2))
    ctx.plot("heatmap", mpath.name, "|Psi|^2")
    ctx.result.metrics.update(case=case, orders=orders, residuals=list(res.history))
    target, tol = float(p.get("order_target", 2.0)), float(p.get("order_tol", 0.2))
    ctx.result.check("convergence_order", abs(orders[-1] - target), tol, relation=f"|order - {target}|")


def task_reduce(ctx: TaskContext, p: dict) -> None:
    sheet, grid = _sheet(ctx, p)
    spec = reduced_spectrum(sheet, int(p.get("n_modes", 6)))
    _write_rows(ctx.path(".csv"), ["k", "energy"], enumerate(spec.energies))
    ctx.result.metrics.update(energies=spec.energies, sheet=sheet.label)
    ctx.result.check("energies_nonnegative", -float(np.min(spec.energies)), 1e-12, relation="-min E")


def task_evolve(ctx: TaskContext, p: dict) -> None:
    sheet, grid = _sheet(ctx, p)
    t0, t1, n = p.get("times", [0.0, 1.0, 11])
    ts = np.linspace(float(t0), float(t1), int(n))
    psi0 = _packet(grid, p.get("packet", {}))
    tol = float(p.get("norm_tol", 1e-8))
    step = float(p.get("max_step", 1e-2))
    drifts = {}
    for label, sh in (("plus", sheet), ("minus", sheet.opposite())):
        states = schrodinger_evolve(sh, psi0, ts, step)
        drifts[label] = norm_drift(states)
        if label == "plus":
            path = ctx.path("_density.csv")
            rows = ((t, x, abs(v) ** 2) for s, t in zip(states, ts) for x, v in zip(grid.points, s.values))
            _write_rows(path, ["t", grid.label, "abs2"], rows)
            ctx.plot("heatmap", path.name, "|psi(t, x)|^2")
    ctx.result.metrics.update(norm_drift=drifts, time_dependent=sheet.time_dependent)
    for label, d in drifts.items():
        ctx.result.check(f"norm_drift_{label}", d, tol, relation="< per unit time")


def task_symmetry(ctx: TaskContext, p: dict) -> None:
    sheet, grid = _sheet(ctx, p)
    T = float(p.get("half_span", 1.0))
    clock = Grid1D(-T, T, int(p.get("clock_points", 21)), "t")
    step = float(p.get("max_step", 1e-2))
    tol = float(p.get("residual_tol", 1e-8))
    psi = evolve_to_grid(sheet, _packet(grid, p.get("packet", {})).values, clock, 0.0, step)
    label = SheetLabel(int(p.get("sheet", 1)), plus_orientation=int(p.get("plus_clock_sign", 1)))
    r = ctx.result
    if sheet.time_dependent:
        r.metrics["motion_reversal"] = "skipped (time-dependent h)"
    else:
        mr = sheet_residual(sheet, motion_reversal(psi), step)
        r.metrics["motion_reversal_residual"] = mr
        r.check("motion_reversal_same_sheet", mr, tol)
    cr, to_sheet = clock_reversal(psi, label)
    res = sheet_residual(sheet.opposite(), cr, step)
    r.metrics.update(clock_reversal_residual=res, from_sheet=label.describe(), to_sheet=to_sheet.describe())
    r.check("clock_reversal_other_sheet", res, tol)
    other = _packet(grid, {"center": 1.0, "width": 0.7, "momentum": -0.5})
    a, b = GridWavefunction((grid,), psi.values[0]), other
    lhs = GridWavefunction((grid,), np.conj(a.values)).inner(GridWavefunction((grid,), np.conj(b.values)))
    anti = abs(lhs - np.conj(a.inner(b)))
    r.check("antiunitarity", anti, 1e-12)


def task_transform(ctx: TaskContext, p: dict) -> None:
    lam = abs(ctx.scenario.model.constants["lam"])
    grid = _grid(p.get("grid", [-1.0, 1.5, 26]), "phi")
    tol = float(p.get("fit_tol", 1e-3))
    kernel = taub_sinh_kernel(lam, int(p.get("branch", 1)))
    out = {}
    for omega in p.get("omegas", [0.5, 1.0, 2.0]):
        omega = float(omega)
        ref = lambda phi, w=omega: mod_bessel_I_imag(w, lam * np.exp(-np.asarray(phi)))
        psi, rep = generalized_fourier(
            kernel, lambda s, w=omega: np.exp(-1j * w * s), grid, (0.0, float(p.get("legs", 6.0))),
            contour="loop", panels=int(p.get("panels", 48)), tol=float(p.get("quad_tol", 1e-8)), reference=ref,
        )
        path = ctx.path(f"_w{omega:g}.csv")
        _write_rows(path, ["phi", "re", "im"], zip(grid.points, psi.values.real, psi.values.imag))
        out[f"{omega:g}"] = rep.to_dict()
        ctx.result.check(f"fit_error_w{omega:g}", rep.fit_error, tol)
    ctx.result.metrics["transforms"] = out


def task_ordering(ctx: TaskContext, p: dict) -> None:
    A, C, b = float(p.get("A", 0.0)), float(p.get("C", 0.0)), float(p.get("b", 1.0))
    grid = _grid(p.get("grid", [-4.0, 4.0, 400]), "q")
    width = float(p.get("width", 0.5))
    fns = [gaussian_bump(float(c), width) for c in p.get("centers", [-1.0, 0.0, 1.0])]
    rep = ordering_check(A, C, b, grid, fns, int(p.get("order", 6)))
    ctx.result.metrics.update(rep.to_dict())
    if C == 0 and A == b:
        ctx.result.check("deviation_vanishes", rep.max_deviation, float(p.get("tol", 1e-8)))
    else:
        rel = float(p.get("rel_tol", 1e-2))
        for which in ("first", "zeroth"):
            got, want = getattr(rep, f"{which}_order_coefficient"), getattr(rep, f"expected_{which}")
            ctx.result.check(f"{which}_coefficient", abs(got - want), rel * max(abs(want), 1e-2) + 1e-8)


def task_hj(ctx: TaskContext, p: dict) -> None:
    model = ctx.model
    c = ctx.scenario.model.constants
    eta, m2 = int(c["eta"]), c["m2"]
    alpha = float(p.get("alpha", 0.5))
    sign = int(p.get("sign", 1))
    start = PhaseState(np.array([float(p.get("u", 0.3)), float(p.get("v", -0.2))]), np.array([0.0, alpha]))
    plus, minus = solve_momentum_on_constraint(model, start, 0)
    s0 = plus if sign > 0 else minus
    hj = hj_complete_solution(eta, m2, alpha, 0.0, sign)
    traj = integrate_trajectory(model, s0, float(p.get("lapse", 1.0)), int(p.get("steps", 1000)), float(p.get("dt", 1e-3)))
    path = ctx.path("_trajectory.csv")
    traj.write_csv(path)
    ctx.plot("trajectory", path.name, "(u, v) trajectory")
    u = np.linspace(-2.0, 2.0, 9)
    residual = float(np.max(np.abs(hj.residual(u, -u))))
    drift = conserved_observables(traj, hj)
    r = ctx.result
    r.metrics.update(hj=hj.to_dict(), degenerate=hj.degenerate, drift=drift.to_dict())
    r.check("hj_residual", residual, 1e-12)
    r.check("observable_drift", max(drift.qbar1_drift, drift.pbar0_drift, drift.pbar1_drift),
            10.0 * max(drift.integrator_drift, 1e-12), relation="< 10 x integrator drift")
    r.check("brackets", max(abs(drift.bracket_qbar1), abs(drift.bracket_pbar1), abs(drift.bracket_gauge)), 1e-8)
    for kind in ("linear", "zero"):
        a = action_endpoint_difference(traj, hj, kind)
        r.metrics[f"action_{kind}"] = a.to_dict()
        r.check(f"action_endpoint_{kind}", a.difference, 1e-8)


TASKS: dict[str, Callable[[TaskContext, dict], None]] = {
    "trajectory": task_trajectory,
    "time_check": task_time_check,
    "wdw_modes": task_wdw_modes,
    "reduce": task_reduce,
    "evolve": task_evolve,
    "symmetry": task_symmetry,
    "transform": task_transform,
    "ordering": task_ordering,
    "hj": task_hj,
}


# -- running ----------------------------------------------------------------------------


def output_root() -> Path:
    return Path(os.environ.get(OUTPUT_ENV, "runs"))


def _run_task(scenario: Scenario, outdir: Path, task: TaskSpec) -> TaskResult:
    result = TaskResult(task.name, task.kind)
    start = time.perf_counter()
    try:
        TASKS[task.kind](TaskContext(scenario, outdir, result), dict(task.params))
    except MinisuperspaceError as exc:
        result.status, result.error, result.message = "error", type(exc).__name__, str(exc)
    except (KeyError, TypeError, ValueError) as exc:
        result.status, result.error, result.message = "error", type(exc).__name__, str(exc)
    result.seconds = time.perf_counter() - start
    return result


def run(scenario: Scenario, outdir: Path | None = None, jobs: int = 1, plots: bool = True) -> RunReport:
    """Execute the scenario's tasks and write report.json, timings.json and plot files.

    With ``jobs > 1`` tasks run concurrently; each writes only its own files
    and the report is assembled in declaration order.
    """
    outdir = Path(outdir) if outdir is not None else output_root() / scenario.name
    outdir.mkdir(parents=True, exist_ok=True)
    report = RunReport(scenario.name, scenario.seed, outdir)
    if jobs > 1 and len(scenario.tasks) > 1:
        with ThreadPoolExecutor(max_workers=jobs) as pool:
            report.tasks = list(pool.map(lambda t: _run_task(scenario, outdir, t), scenario.tasks))
    else:
        report.tasks = [_run_task(scenario, outdir, t) for t in scenario.tasks]
    _write_json(outdir / "report.json", report.to_dict())
    _write_json(outdir / "timings.json", {t.name: round(t.seconds, 6) for t in report.tasks})
    if plots:
        emit_plots(report)
    return report


# -- plot files ---------------------------------------------------------------------------

_STUBS = {
    "trajectory": "ax.plot(d[:, 1], d[:, 2])\nax.set_xlabel(cols[1]); ax.set_ylabel(cols[2])",
    "heatmap": "ax.tricontourf(d[:, 0], d[:, 1], d[:, 2], 40)\nax.set_xlabel(cols[0]); ax.set_ylabel(cols[1])",
    "loglog": "ax.loglog(d[:, 0], d[:, 1], 'o-')\nax.set_xlabel(cols[0]); ax.set_ylabel(cols[1])",
}


def _read_csv(path: Path) -> tuple[list[str], np.ndarray]:
    with path.open(encoding="utf-8") as fh:
        rows = list(csv.reader(fh))
    return rows[0], np.array([[float(v) for v in r] for r in rows[1:]])


def emit_plots(report: RunReport) -> list[Path]:
    """Plot-ready whitespace-separated data plus a matplotlib script stub per figure.

    Trajectories give (tau, q0, q1) columns; convergence data carries the
    fitted log-log slope in its header.  A missing data file raises
    FileNotFoundError.
    """
    written: list[Path] = []
    entries = [(t, pl) for t in report.tasks for pl in t.plots]
    if not entries:
        return written
    folder = report.output_dir / "plots"
    folder.mkdir(exist_ok=True)
    for task, pl in entries:
        src = report.output_dir / pl["data"]
        if not src.exists():
            raise FileNotFoundError(f"plot data {src} is missing")
        header, data = _read_csv(src)
        notes = [f"# {pl['title']}"]
        if pl["type"] == "trajectory":
            header, data = header[:3], data[:, :3]
        elif pl["type"] == "loglog":
            slope = float(np.polyfit(np.log(data[:, 0]), np.log(data[:, 1]), 1)[0])
            notes.append(f"# fitted slope = {slope!r}")
        stem = Path(pl["data"]).stem
        dat = folder / f"{stem}.dat"
        buf = io.StringIO()
        buf.write("\n".join(notes) + "\n# " + " ".join(header) + "\n")
        for row in data:
            buf.write(" ".join(repr(float(v)) for v in row) + "\n")
        dat.write_text(buf.getvalue(), encoding="utf-8")
        script = folder / f"{stem}_plot.py"
        script.write_text(
            "import numpy as np\nimport matplotlib.pyplot as plt\n\n"
            f"d = np.loadtxt({dat.name!r})\ncols = {header!r}\nfig, ax = plt.subplots()\n"
            f"{_STUBS[pl['type']]}\nax.set_title({pl['title']!r})\nfig.savefig({stem + '.png'!r})\n",
            encoding="utf-8",
        )
        written += [dat, script]
    return written


# -- entry point ----------------------------------------------------------------------------


def _tables(args) -> int:
    xs = np.logspace(math.log10(args.x_range[0]), math.log10(args.x_range[1]), args.points)
    rows = bessel_table(args.omega, xs)
    out = open(args.output, "w", newline="", encoding="utf-8") if args.output else sys.stdout
    try:
        w = csv.writer(out, lineterminator="\n")
        w.writerow(["omega", "x", "family", "re", "im", "est_error"])
        for r in rows:
            w.writerow([repr(float(r[0])), repr(float(r[1])), r[2], *(repr(float(v)) for v in r[3:])])
    finally:
        if args.output:
            out.close()
    return EXIT_OK


def _resolve(name: str) -> Path:
    path = Path(name)
    if path.exists():
        return path
    bundled = bundled_scenarios()
    if name in bundled:
        return bundled[name]
    return path


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="minisuperspace", description="Minisuperspace quantization toolkit")
    sub = ap.add_subparsers(dest="command", required=True)
    r = sub.add_parser("run", help="run a scenario file or a bundled scenario name")
    r.add_argument("scenario")
    r.add_argument("--output", help=f"output directory (default ${OUTPUT_ENV}/<name>)")
    r.add_argument("--jobs", type=int, default=1, help="run independent tasks concurrently")
    r.add_argument("--no-plots", action="store_true")
    t = sub.add_parser("tables", help="special-function tables")
    tsub = t.add_subparsers(dest="table", required=True)
    b = tsub.add_parser("bessel")
    b.add_argument("--omega", type=float, nargs="+", required=True)
    b.add_argument("--x-range", type=float, nargs=2, required=True, metavar=("XMIN", "XMAX"))
    b.add_argument("--points", type=int, default=20)
    b.add_argument("--output")
    sub.add_parser("version")
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    if args.command == "version":
        print(__version__)
        return EXIT_OK
    if args.command == "tables":
        try:
            return _tables(args)
        except MinisuperspaceError as exc:
            print(f"error: {exc}", file=sys.stderr)
            return EXIT_TASK_FAILED
    try:
        scenario = load_scenario(_resolve(args.scenario))
    except ScenarioParseError as exc:
        print(f"parse error: {exc}", file=sys.stderr)
        return EXIT_PARSE
    except ScenarioValidationError as exc:
        print(f"validation error: {exc}", file=sys.stderr)
        return EXIT_VALIDATION
    report = run(scenario, args.output, args.jobs, not args.no_plots)
    for t in report.tasks:
        extra = f" [{t.error}: {t.message}]" if t.error else ""
        print(f"{t.status.upper():7s} {t.name} ({t.kind}){extra}")
    print(f"report: {report.output_dir / 'report.json'}")
    return EXIT_OK if report.ok else EXIT_TASK_FAILED


if __name__ == "__main__":
    sys.exit(main())
