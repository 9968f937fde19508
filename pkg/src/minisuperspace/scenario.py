"""Declarative scenario files: YAML with a model section and an ordered task list.

Schema::

    name: zeta_neg_demo          # used as the output subdirectory
    seed: 7                      # single seed for every random draw
    model:
      case: xy                   # xy | taub | dilaton_lambda0 | dilaton_flat | uv
      zeta: -1.0                 # constants required by the case
    tasks:
      - kind: time_check         # see TASK_KINDS
        name: clocks             # optional, defaults to <kind>_<index>
        ...                      # task parameters (defaults live in cli.py)

Required constants per case: xy -> zeta; taub -> cbar (< 0), lam (!= 0);
dilaton_lambda0 -> c, k; dilaton_flat -> c, lam; uv -> eta (+-1), m2 (> 0).
"""

from __future__ import annotations

from dataclasses import dataclass, field
from pathlib import Path
from typing import Any

import yaml

from .errors import ScenarioParseError, ScenarioValidationError
from .model import (
    MinisuperspaceModel,
    dilaton_model_flat,
    dilaton_model_lambda0,
    taub_model,
    uv_model,
    xy_model,
)

TASK_KINDS = ("trajectory", "time_check", "wdw_modes", "reduce", "evolve", "transform", "symmetry", "ordering", "hj")
CASE_CONSTANTS = {
    "xy": ("zeta",),
    "taub": ("cbar", "lam"),
    "dilaton_lambda0": ("c", "k"),
    "dilaton_flat": ("c", "lam"),
    "uv": ("eta", "m2"),
}


@dataclass(frozen=True)
class ModelSpec:
    case: str
    constants: dict[str, float]

    def build(self) -> MinisuperspaceModel:
        c = self.constants
        if self.case == "xy":
            return xy_model(c["zeta"])
        if self.case == "taub":
            return taub_model(c["cbar"], c["lam"])
        if self.case == "dilaton_lambda0":
            return dilaton_model_lambda0(c["c"], c["k"])
        if self.case == "dilaton_flat":
            return dilaton_model_flat(c["c"], c["lam"])
        return uv_model(int(c["eta"]), c["m2"])

    @property
    def mode_case(self) -> str | None:
        """Closed-form mode family for this model, if any."""
        if self.case == "taub":
            return "taub"
        if self.case == "xy" and self.constants["zeta"] != 0:
            return "zeta_pos" if self.constants["zeta"] > 0 else "zeta_neg"
        return None


@dataclass(frozen=True)
class TaskSpec:
    kind: str
    name: str
    params: dict[str, Any] = field(default_factory=dict)


@dataclass(frozen=True)
class Scenario:
    name: str
    seed: int
    model: ModelSpec
    tasks: tuple[TaskSpec, ...]
    source: str = ""


def _validate_model(raw: Any) -> ModelSpec:
    if not isinstance(raw, dict) or "case" not in raw:
        raise ScenarioValidationError("model section must be a mapping with a 'case' key")
    case = raw["case"]
    if case not in CASE_CONSTANTS:
        raise ScenarioValidationError(f"unknown model case {case!r}; expected one of {sorted(CASE_CONSTANTS)}")
    constants = {}
    for key in CASE_CONSTANTS[case]:
        if key not in raw:
            raise ScenarioValidationError(f"model case {case!r} requires constant {key!r}")
        try:
            constants[key] = float(raw[key])
        except (TypeError, ValueError):
            raise ScenarioValidationError(f"model constant {key!r} must be a number, got {raw[key]!r}") from None
    extra = set(raw) - {"case", *CASE_CONSTANTS[case]}
    if extra:
        raise ScenarioValidationError(f"model case {case!r} does not take {sorted(extra)}")
    if case == "taub":
        if not constants["cbar"] < 0:
            raise ScenarioValidationError(f"taub case requires cbar < 0 (got cbar = {constants['cbar']:g})")
        if constants["lam"] == 0:
            raise ScenarioValidationError("taub case requires lam != 0")
    if case == "uv":
        if constants["eta"] not in (1.0, -1.0):
            raise ScenarioValidationError("uv case requires eta = +1 or -1")
        if not constants["m2"] > 0:
            raise ScenarioValidationError("uv case requires m2 > 0")
    return ModelSpec(case, constants)


def _validate_tasks(raw: Any, model: ModelSpec) -> tuple[TaskSpec, ...]:
    if raw is None:
        return ()
    if not isinstance(raw, list):
        raise ScenarioValidationError("tasks must be a list")
    out, names = [], set()
    for i, t in enumerate(raw):
        if not isinstance(t, dict) or "kind" not in t:
            raise ScenarioValidationError(f"task {i} must be a mapping with a 'kind' key")
        kind = t["kind"]
        if kind not in TASK_KINDS:
            raise ScenarioValidationError(f"task {i}: unknown kind {kind!r}; expected one of {list(TASK_KINDS)}")
        name = str(t.get("name", f"{kind}_{i}"))
        if name in names:
            raise ScenarioValidationError(f"duplicate task name {name!r}")
        names.add(name)
        params = {k: v for k, v in t.items() if k not in ("kind", "name")}
        if kind == "wdw_modes" and model.mode_case is None:
            raise ScenarioValidationError(f"task {name!r}: wdw_modes needs an xy (zeta != 0) or taub model")
        if kind == "wdw_modes" and "omega" not in params:
            raise ScenarioValidationError(f"task {name!r}: wdw_modes requires 'omega'")
        if kind == "hj" and model.case != "uv":
            raise ScenarioValidationError(f"task {name!r}: hj requires the uv model case")
        if kind == "transform" and model.case != "taub":
            raise ScenarioValidationError(f"task {name!r}: transform requires the taub model case")
        out.append(TaskSpec(kind, name, params))
    return tuple(out)


def parse_scenario(text: str, source: str = "") -> Scenario:
    try:
        raw = yaml.safe_load(text)
    except yaml.YAMLError as exc:
        raise ScenarioParseError(f"{source or 'scenario'}: {exc}") from None
    if not isinstance(raw, dict):
        raise ScenarioParseError(f"{source or 'scenario'}: top level must be a mapping")
    if "model" not in raw:
        raise ScenarioValidationError("scenario needs a 'model' section")
    model = _validate_model(raw["model"])
    seed = raw.get("seed", 0)
    if not isinstance(seed, int) or isinstance(seed, bool):
        raise ScenarioValidationError(f"seed must be an integer, got {seed!r}")
    name = str(raw.get("name", Path(source).stem if source else "scenario"))
    return Scenario(name, seed, model, _validate_tasks(raw.get("tasks"), model), source)


def load_scenario(path: str | Path) -> Scenario:
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as exc:
        raise ScenarioParseError(f"cannot read {path}: {exc}") from None
    return parse_scenario(text, str(path))


def bundled_scenarios() -> dict[str, Path]:
    folder = Path(__file__).parent / "scenarios"
    return {p.stem: p for p in sorted(folder.glob("*.yaml"))}
