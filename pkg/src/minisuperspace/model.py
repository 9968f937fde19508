"""Minisuperspace models with exponential potentials and their classical dynamics.

All dynamics use the scaled constraint

    H(q, p) = sum_i s_i p_i**2 + sum_t A_t exp(a_t . q)

with a diagonal supermetric of signature (-, +, ..., +).  Trajectories are
integrated at constant lapse with a time-symmetric splitting scheme.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Sequence

import numpy as np

from .errors import ConstraintInfeasibleError, DriftExceededError, InvalidArgumentError

DEFAULT_DRIFT_BOUND = 1e-6


@dataclass(frozen=True)
class ExpPotentialTerm:
    """One term ``coefficient * exp(exponents . q)`` of the potential."""

    coefficient: float
    exponents: tuple[float, ...]

    def __post_init__(self):
        object.__setattr__(self, "coefficient", float(self.coefficient))
        object.__setattr__(self, "exponents", tuple(float(e) for e in self.exponents))
        if not math.isfinite(self.coefficient):
            raise InvalidArgumentError("potential coefficient must be finite")

    def value(self, q) -> float:
        return self.coefficient * math.exp(float(np.dot(self.exponents, q)))

    @property
    def is_constant(self) -> bool:
        return all(e == 0.0 for e in self.exponents)


@dataclass(frozen=True)
class PhaseState:
    q: tuple[float, ...]
    p: tuple[float, ...]
    tau: float = 0.0

    def __post_init__(self):
        q = tuple(float(v) for v in np.ravel(self.q))
        p = tuple(float(v) for v in np.ravel(self.p))
        if len(q) != len(p):
            raise InvalidArgumentError(f"q has {len(q)} entries but p has {len(p)}")
        if not all(math.isfinite(v) for v in q + p) or not math.isfinite(self.tau):
            raise InvalidArgumentError("phase state entries must be finite")
        object.__setattr__(self, "q", q)
        object.__setattr__(self, "p", p)
        object.__setattr__(self, "tau", float(self.tau))

    @property
    def dimension(self) -> int:
        return len(self.q)

    def as_arrays(self) -> tuple[np.ndarray, np.ndarray]:
        return np.array(self.q), np.array(self.p)

    def with_momentum(self, axis: int, value: float) -> "PhaseState":
        p = list(self.p)
        p[axis] = value
        return PhaseState(self.q, tuple(p), self.tau)

    def to_dict(self) -> dict:
        return {"q": list(self.q), "p": list(self.p), "tau": self.tau}


@dataclass(frozen=True)
class MinisuperspaceModel:
    """Diagonal supermetric signs plus a sum of exponential potential terms.

    ``scale_exponents`` records the positive factor relating the scaled
    constraint to the original one, ``calH = 0.5 * exp(-scale . q) * H``.  It is
    only used for display.
    """

    metric_signs: tuple[int, ...]
    potential: tuple[ExpPotentialTerm, ...] = ()
    coordinate_labels: tuple[str, ...] = ()
    name: str = "model"
    scale_exponents: tuple[float, ...] | None = None
    _exponent_matrix: np.ndarray = field(init=False, repr=False, compare=False)
    _coefficients: np.ndarray = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        signs = tuple(int(s) for s in self.metric_signs)
        if len(signs) < 2:
            raise InvalidArgumentError("model dimension must be at least 2")
        if any(s not in (-1, 1) for s in signs):
            raise InvalidArgumentError("metric signs must be +1 or -1")
        if signs.count(-1) != 1 or signs[0] != -1:
            raise InvalidArgumentError("exactly one metric sign must be -1, on the first axis")
        terms = tuple(t for t in self.potential if t.coefficient != 0.0)
        for t in terms:
            if len(t.exponents) != len(signs):
                raise InvalidArgumentError("potential exponent vector length must equal the model dimension")
        labels = tuple(self.coordinate_labels) or tuple(f"q{i}" for i in range(len(signs)))
        if len(labels) != len(signs):
            raise InvalidArgumentError("one coordinate label per axis is required")
        object.__setattr__(self, "metric_signs", signs)
        object.__setattr__(self, "potential", terms)
        object.__setattr__(self, "coordinate_labels", labels)
        d = len(signs)
        E = np.array([t.exponents for t in terms], dtype=float).reshape(len(terms), d)
        A = np.array([t.coefficient for t in terms], dtype=float)
        object.__setattr__(self, "_exponent_matrix", E)
        object.__setattr__(self, "_coefficients", A)

    @property
    def dimension(self) -> int:
        return len(self.metric_signs)

    @property
    def signs(self) -> np.ndarray:
        return np.array(self.metric_signs, dtype=float)

    def axis(self, label: str | int) -> int:
        if isinstance(label, (int, np.integer)):
            if not 0 <= label < self.dimension:
                raise InvalidArgumentError(f"axis {label} out of range")
            return int(label)
        try:
            return self.coordinate_labels.index(label)
        except ValueError:
            raise InvalidArgumentError(f"unknown coordinate {label!r}") from None

    def potential_value(self, q) -> float:
        if not self.potential:
            return 0.0
        return float(self._coefficients @ np.exp(self._exponent_matrix @ np.asarray(q, float)))

    def potential_gradient(self, q) -> np.ndarray:
        if not self.potential:
            return np.zeros(self.dimension)
        w = self._coefficients * np.exp(self._exponent_matrix @ np.asarray(q, float))
        return self._exponent_matrix.T @ w

    def kinetic(self, p) -> float:
        p = np.asarray(p, float)
        return float(np.dot(self.signs, p * p))

    def constraint(self, q, p) -> float:
        return self.kinetic(p) + self.potential_value(q)

    def potential_sign(self) -> int:
        """+1 or -1 when every term has that sign, 0 otherwise (or for no terms)."""
        signs = {np.sign(t.coefficient) for t in self.potential}
        if len(signs) == 1:
            return int(signs.pop())
        return 0

    def unscaled_constraint(self, q, p) -> float:
        if self.scale_exponents is None:
            raise InvalidArgumentError(f"model {self.name!r} declares no scaling factor")
        return 0.5 * math.exp(-float(np.dot(self.scale_exponents, q))) * self.constraint(q, p)

    def _check(self, state: PhaseState):
        if state.dimension != self.dimension:
            raise InvalidArgumentError(
                f"state dimension {state.dimension} does not match model dimension {self.dimension}"
            )


# -- named models ---------------------------------------------------------------

_DIL = ("Omega", "phi")


def dilaton_model_lambda0(c: float, k: float) -> MinisuperspaceModel:
    """Scaled constraint -p_O^2 + p_phi^2 + 2c e^{6 Omega + phi} - k e^{4 Omega}."""
    terms = (ExpPotentialTerm(2.0 * c, (6.0, 1.0)), ExpPotentialTerm(-k, (4.0, 0.0)))
    return MinisuperspaceModel((-1, 1), terms, _DIL, f"lambda0(c={c},k={k})", (3.0, 0.0))


def dilaton_model_flat(c: float, lam: float) -> MinisuperspaceModel:
    """Scaled constraint -p_O^2 + p_phi^2 + 2c e^{6 Omega + phi} + lambda^2 e^{-2 phi}."""
    terms = (ExpPotentialTerm(2.0 * c, (6.0, 1.0)), ExpPotentialTerm(lam * lam, (0.0, -2.0)))
    return MinisuperspaceModel((-1, 1), terms, _DIL, f"flat(c={c},lambda={lam})", (3.0, 0.0))


def generic_exponential_model(A: float, a: float, b: float, labels=("q1", "q2")) -> MinisuperspaceModel:
    """-p_1^2 + p_2^2 + A exp(a q1 + b q2)."""
    return MinisuperspaceModel((-1, 1), (ExpPotentialTerm(A, (a, b)),), labels, f"exp(A={A},a={a},b={b})")


def xy_model(zeta: float) -> MinisuperspaceModel:
    """-p_x^2 + p_y^2 + zeta e^{2x}."""
    return MinisuperspaceModel((-1, 1), (ExpPotentialTerm(zeta, (2.0, 0.0)),), ("x", "y"), f"xy(zeta={zeta})")


def taub_model(cbar: float, lam: float) -> MinisuperspaceModel:
    """-p_O^2 + p_phi^2 + 2 cbar e^{6 Omega} + lambda^2 e^{-2 phi}."""
    terms = (ExpPotentialTerm(2.0 * cbar, (6.0, 0.0)), ExpPotentialTerm(lam * lam, (0.0, -2.0)))
    return MinisuperspaceModel((-1, 1), terms, _DIL, f"taub(cbar={cbar},lambda={lam})", (3.0, 0.0))


def taub_reduced_model(cbar: float) -> MinisuperspaceModel:
    """-p_O^2 + p_s^2 + 2 cbar e^{6 Omega}, the constraint after the sinh transformation."""
    return MinisuperspaceModel(
        (-1, 1), (ExpPotentialTerm(2.0 * cbar, (6.0, 0.0)),), ("Omega", "s"), f"taub_s(cbar={cbar})"
    )


def uv_model(eta: int, m2: float) -> MinisuperspaceModel:
    """-p_u^2 + p_v^2 + eta m^2 (constant potential)."""
    return MinisuperspaceModel((-1, 1), (ExpPotentialTerm(eta * m2, (0.0, 0.0)),), ("u", "v"), f"uv(eta={eta},m2={m2})")


# -- operations -----------------------------------------------------------------


def evaluate_constraint(model: MinisuperspaceModel, state: PhaseState) -> float:
    model._check(state)
    return model.constraint(state.q, state.p)


def hamilton_rhs(model: MinisuperspaceModel, state: PhaseState, lapse: float) -> tuple[np.ndarray, np.ndarray]:
    """Right-hand side (dq/dtau, dp/dtau) of the canonical equations."""
    model._check(state)
    if not lapse > 0:
        raise InvalidArgumentError(f"lapse must be positive, got {lapse}")
    q, p = state.as_arrays()
    dq = lapse * 2.0 * model.signs * p
    dp = -lapse * model.potential_gradient(q)
    return dq, dp


def solve_momentum_on_constraint(
    model: MinisuperspaceModel, partial_state: PhaseState, axis: int | str
) -> tuple[PhaseState, PhaseState]:
    """Solve H = 0 for the momentum on ``axis``; returns the (+root, -root) states.

    The value currently stored for that momentum is ignored.
    """
    model._check(partial_state)
    i = model.axis(axis)
    q, p = partial_state.as_arrays()
    p[i] = 0.0
    rest = model.constraint(q, p)
    disc = -rest / model.metric_signs[i]
    scale = abs(model.kinetic(p)) + sum(abs(t.value(q)) for t in model.potential)
    if disc < 0:
        if disc > -4e-16 * max(scale, 1.0):
            disc = 0.0
        else:
            raise ConstraintInfeasibleError(
                f"no real momentum on axis {model.coordinate_labels[i]}: p^2 = {disc:.6g}", discriminant=disc
            )
    root = math.sqrt(disc)
    return partial_state.with_momentum(i, root), partial_state.with_momentum(i, -root)


@dataclass(frozen=True)
class Trajectory:
    """Sampled solution of the canonical equations at constant lapse."""

    model: MinisuperspaceModel
    taus: np.ndarray
    qs: np.ndarray
    ps: np.ndarray
    lapse_values: np.ndarray
    dt: float
    method: str = "verlet"

    def __post_init__(self):
        if len(self.taus) == 0:
            raise InvalidArgumentError("empty trajectory")
        if len(self.taus) > 1 and not np.all(np.diff(self.taus) > 0):
            raise InvalidArgumentError("tau must increase strictly along a trajectory")
        if not np.all(self.lapse_values > 0):
            raise InvalidArgumentError("lapse values must be positive")

    def __len__(self):
        return len(self.taus)

    @property
    def states(self) -> list[PhaseState]:
        return [PhaseState(q, p, t) for q, p, t in zip(self.qs, self.ps, self.taus)]

    @property
    def initial(self) -> PhaseState:
        return PhaseState(self.qs[0], self.ps[0], self.taus[0])

    @property
    def final(self) -> PhaseState:
        return PhaseState(self.qs[-1], self.ps[-1], self.taus[-1])

    @property
    def lapse(self) -> float:
        return float(self.lapse_values[0])

    def constraint_residuals(self) -> np.ndarray:
        return np.array([self.model.constraint(q, p) for q, p in zip(self.qs, self.ps)])

    @property
    def max_drift(self) -> float:
        return float(np.max(np.abs(self.constraint_residuals())))

    def write_csv(self, path: str | Path) -> Path:
        path = Path(path)
        d = self.model.dimension
        header = ["tau"] + [f"q{i}" for i in range(d)] + [f"p{i}" for i in range(d)] + ["H_residual"]
        res = self.constraint_residuals()
        with path.open("w", newline="\n", encoding="utf-8") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(header)
            for k in range(len(self.taus)):
                row = [self.taus[k], *self.qs[k], *self.ps[k], res[k]]
                w.writerow([repr(float(v)) for v in row])
        return path


# Yoshida triple-jump weights for a fourth-order symmetric composition.
_Y1 = 1.0 / (2.0 - 2.0 ** (1.0 / 3.0))
_Y0 = -(2.0 ** (1.0 / 3.0)) * _Y1


def _verlet_step(model, q, p, h, lapse):
    p = p - 0.5 * h * lapse * model.potential_gradient(q)
    q = q + h * lapse * 2.0 * model.signs * p
    p = p - 0.5 * h * lapse * model.potential_gradient(q)
    return q, p


def integrate_trajectory(
    model: MinisuperspaceModel,
    initial: PhaseState,
    lapse: float,
    steps: int,
    dt: float,
    drift_bound: float = DEFAULT_DRIFT_BOUND,
    method: str = "verlet",
    start_tol: float = 1e-10,
) -> Trajectory:
    """Integrate the canonical equations with a symmetric splitting scheme.

    ``method`` is ``"verlet"`` (Stormer-Verlet, second order) or ``"yoshida4"``
    (its fourth-order triple-jump composition).  The returned trajectory has
    ``steps + 1`` states.  The initial state must satisfy |H| < ``start_tol``.
    """
    model._check(initial)
    if not lapse > 0:
        raise InvalidArgumentError(f"lapse must be positive, got {lapse}")
    if not dt > 0:
        raise InvalidArgumentError(f"dt must be positive, got {dt}")
    if steps < 1:
        raise InvalidArgumentError("at least one step is required")
    h0 = evaluate_constraint(model, initial)
    if abs(h0) >= start_tol:
        raise InvalidArgumentError(f"initial state is off the constraint surface (H = {h0:.3e})")
    if method == "verlet":
        sub = (1.0,)
    elif method == "yoshida4":
        sub = (_Y1, _Y0, _Y1)
    else:
        raise InvalidArgumentError(f"unknown integrator {method!r}")

    d = model.dimension
    qs = np.empty((steps + 1, d))
    ps = np.empty((steps + 1, d))
    q, p = initial.as_arrays()
    qs[0], ps[0] = q, p
    for n in range(1, steps + 1):
        for w in sub:
            q, p = _verlet_step(model, q, p, w * dt, lapse)
        if not (np.all(np.isfinite(q)) and np.all(np.isfinite(p))):
            raise DriftExceededError(f"trajectory diverged at step {n}", step=n, drift=math.inf)
        drift = abs(model.constraint(q, p))
        if drift > drift_bound:
            raise DriftExceededError(
                f"constraint drift {drift:.3e} exceeds bound {drift_bound:.1e} at step {n}", step=n, drift=drift
            )
        qs[n], ps[n] = q, p
    taus = initial.tau + dt * np.arange(steps + 1)
    return Trajectory(model, taus, qs, ps, np.full(steps + 1, float(lapse)), float(dt), method)


def motion_reverse_trajectory(traj: Trajectory, drift_bound: float = DEFAULT_DRIFT_BOUND) -> Trajectory:
    """Re-integrate from the final point with reversed momenta, same lapse and step."""
    if len(traj) == 0:
        raise InvalidArgumentError("empty trajectory")
    start = PhaseState(traj.qs[-1], -traj.ps[-1], traj.taus[0])
    # Start from the exact endpoint (no re-projection) so the symmetric
    # scheme retraces the forward states up to rounding.
    return integrate_trajectory(
        traj.model, start, traj.lapse, len(traj) - 1, traj.dt, drift_bound=drift_bound,
        method=traj.method, start_tol=drift_bound,
    )


def free_trajectory(model: MinisuperspaceModel, initial: PhaseState, lapse: float, taus: Sequence[float]) -> Trajectory:
    """Exact trajectory for constant potentials (straight lines in q)."""
    if any(not t.is_constant for t in model.potential):
        raise InvalidArgumentError("exact trajectories are only available for constant potentials")
    q0, p0 = initial.as_arrays()
    taus = np.asarray(taus, float)
    rel = (taus - taus[0])[:, None]
    qs = q0[None, :] + rel * lapse * 2.0 * model.signs[None, :] * p0[None, :]
    ps = np.repeat(p0[None, :], len(taus), axis=0)
    dt = float(taus[1] - taus[0]) if len(taus) > 1 else 0.0
    return Trajectory(model, taus, qs, ps, np.full(len(taus), float(lapse)), dt, "exact")
