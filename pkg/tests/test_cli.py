import json
from pathlib import Path

import pytest

from minisuperspace import __version__
from minisuperspace.cli import (
    EXIT_OK,
    EXIT_PARSE,
    EXIT_TASK_FAILED,
    EXIT_VALIDATION,
    OUTPUT_ENV,
    RunReport,
    TaskResult,
    emit_plots,
    main,
    run,
)
from minisuperspace.errors import ScenarioValidationError
from minisuperspace.scenario import bundled_scenarios, load_scenario, parse_scenario

CLOCKS = """
name: clocks_only
seed: 5
model: {case: xy, zeta: -1.0}
tasks:
  - kind: time_check
    name: clocks
    samples: 50
    candidates:
      - {axis: y, sign: 1, solve_axis: y, root: 1, expect: %s}
"""


def write(tmp_path, text, name="s.yaml"):
    p = tmp_path / name
    p.write_text(text)
    return p


def test_version(capsys):
    assert main(["version"]) == EXIT_OK
    assert capsys.readouterr().out.strip() == __version__


def test_passing_and_failing_tasks(tmp_path):
    out = tmp_path / "ok"
    assert main(["run", str(write(tmp_path, CLOCKS % "global")), "--output", str(out)]) == EXIT_OK
    rep = json.loads((out / "report.json").read_text())
    assert rep["status"] == "ok" and rep["tasks"][0]["metrics"]["+y"] == "global"
    bad = tmp_path / "bad"
    assert main(["run", str(write(tmp_path, CLOCKS % "not_global", "f.yaml")), "--output", str(bad)]) == EXIT_TASK_FAILED
    assert json.loads((bad / "report.json").read_text())["tasks"][0]["status"] == "failed"


def test_parse_error(tmp_path, capsys):
    assert main(["run", str(write(tmp_path, "model: [unclosed"))]) == EXIT_PARSE
    assert main(["run", str(tmp_path / "missing.yaml")]) == EXIT_PARSE
    assert "parse error" in capsys.readouterr().err


def test_taub_requires_negative_cbar(tmp_path, capsys):
    text = "model: {case: taub, cbar: 0.5, lam: 1.0}\n"
    assert main(["run", str(write(tmp_path, text))]) == EXIT_VALIDATION
    assert "taub case requires cbar < 0 (got cbar = 0.5)" in capsys.readouterr().err


@pytest.mark.parametrize(
    "text",
    [
        "model: {case: xy}",
        "model: {case: uv, eta: 2, m2: 1}",
        "model: {case: xy, zeta: 1}\ntasks: [{kind: hj}]",
        "model: {case: xy, zeta: 1}\ntasks: [{kind: wdw_modes}]",
        "model: {case: xy, zeta: 1}\ntasks: [{kind: nope}]",
        "model: {case: xy, zeta: 1}\nseed: 1.5",
        "model: {case: xy, zeta: 1}\ntasks: [{kind: trajectory, name: a}, {kind: evolve, name: a}]",
    ],
)
def test_validation_errors(text):
    with pytest.raises(ScenarioValidationError):
        parse_scenario(text)


def test_empty_task_list_and_env_output(tmp_path, monkeypatch):
    monkeypatch.setenv(OUTPUT_ENV, str(tmp_path / "env"))
    assert main(["run", str(write(tmp_path, "name: empty\nmodel: {case: xy, zeta: 1.0}\ntasks: []\n"))]) == EXIT_OK
    rep = json.loads((tmp_path / "env" / "empty" / "report.json").read_text())
    assert rep == {"scenario": "empty", "seed": 0, "status": "ok", "tasks": []}
    assert not (tmp_path / "env" / "empty" / "plots").exists()


def _tree(folder: Path) -> dict:
    return {str(p.relative_to(folder)): p.read_bytes() for p in sorted(folder.rglob("*")) if p.is_file() and p.name != "timings.json"}


def test_runs_are_deterministic_and_job_independent(tmp_path):
    scen = load_scenario(bundled_scenarios()["uv_hj_demo"])
    a = run(scen, tmp_path / "a")
    b = run(scen, tmp_path / "b", jobs=3)
    assert a.ok and b.ok
    assert _tree(tmp_path / "a") == _tree(tmp_path / "b")
    assert (tmp_path / "a" / "timings.json").exists()


def test_emit_plots(tmp_path):
    res = TaskResult("conv", "wdw_modes")
    (tmp_path / "conv.csv").write_text("h,err\n0.1,0.01\n0.05,0.0025\n")
    res.plots.append({"type": "loglog", "data": "conv.csv", "title": "convergence"})
    files = emit_plots(RunReport("x", 0, tmp_path, [res]))
    assert [f.name for f in files] == ["conv.dat", "conv_plot.py"]
    slope_line = files[0].read_text().splitlines()[1]
    assert float(slope_line.split("=")[1]) == pytest.approx(2.0, abs=1e-12)
    res.plots.append({"type": "loglog", "data": "gone.csv", "title": "missing"})
    with pytest.raises(FileNotFoundError):
        emit_plots(RunReport("x", 0, tmp_path, [res]))


def test_bessel_table(tmp_path):
    out = tmp_path / "t.csv"
    args = ["tables", "bessel", "--omega", "0.5", "1", "--x-range", "0.1", "10", "--points", "4", "--output", str(out)]
    assert main(args) == EXIT_OK
    lines = out.read_text().splitlines()
    assert lines[0] == "omega,x,family,re,im,est_error"
    assert len(lines) > 8
    assert main(["tables", "bessel", "--omega", "60", "--x-range", "1", "2"]) == EXIT_TASK_FAILED
