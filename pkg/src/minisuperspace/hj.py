"""Hamilton-Jacobi deparametrization of the constant-potential constraint.

For H = -p_u^2 + p_v^2 + eta m^2 the complete solution

    W(u, v; alpha, E) = alpha v + sign * sqrt(alpha^2 + eta m^2 - E) * u

generates (u, v, p_u, p_v) -> (Qbar^0, Qbar^1, Pbar_0 = E, Pbar_1 = alpha) with

    Qbar^0 = dW/dE = -u / (2 p_u),    Qbar^1 = dW/dalpha = v + alpha u / p_u.

A second map F = P_0 Qbar^0 + f(Qbar^1, P_1, tau) with the default
f = Qbar^1 P_1 + P_1 tau gives Q^1 = Qbar^1 + tau, P_1 = alpha and the true
Hamiltonian df/dtau = P_1.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .canonical import PhaseFunction, constraint_function, poisson_bracket
from .errors import InvalidArgumentError, NoRealSolutionError
from .model import PhaseState, Trajectory


@dataclass(frozen=True)
class HJSolution:
    eta: int
    m2: float
    alpha: float
    E: float
    sign: int = 1

    @property
    def root(self) -> float:
        return math.sqrt(max(0.0, self.alpha**2 + self.eta * self.m2 - self.E))

    @property
    def degenerate(self) -> bool:
        """True on the admissibility boundary, where dW/dalpha and dW/dE are singular."""
        return self.root == 0.0

    def W(self, u, v):
        return self.alpha * np.asarray(v) + self.sign * self.root * np.asarray(u)

    def gradient(self, u, v):
        """(dW/du, dW/dv), i.e. the momenta (p_u, p_v)."""
        u = np.asarray(u, float)
        return self.sign * self.root * np.ones_like(u), self.alpha * np.ones_like(u)

    def residual(self, u, v) -> np.ndarray:
        """-W_u^2 + W_v^2 + eta m^2 - E at the given points."""
        wu, wv = self.gradient(u, v)
        return -wu * wu + wv * wv + self.eta * self.m2 - self.E

    def qbar(self, u, v):
        """(Qbar^0, Qbar^1) = (dW/dE, dW/dalpha)."""
        if self.degenerate:
            raise NoRealSolutionError("Qbar is singular when alpha^2 + eta m^2 = E")
        u, v = np.asarray(u, float), np.asarray(v, float)
        r = self.sign * self.root
        return -u / (2.0 * r), v + self.alpha * u / r

    def to_dict(self) -> dict:
        return {"eta": self.eta, "m2": self.m2, "alpha": self.alpha, "E": self.E, "sign": self.sign}


def hj_complete_solution(eta: int, m2: float, alpha: float, E: float, sign: int = 1) -> HJSolution:
    if eta not in (1, -1):
        raise InvalidArgumentError("eta must be +1 or -1")
    if not m2 > 0:
        raise InvalidArgumentError("m2 must be positive")
    if sign not in (1, -1):
        raise InvalidArgumentError("sign must be +1 or -1")
    disc = alpha * alpha + eta * m2 - E
    if disc < 0:
        raise NoRealSolutionError(f"alpha^2 + eta m^2 - E = {disc:.6g} < 0 has no real root")
    return HJSolution(int(eta), float(m2), float(alpha), float(E), int(sign))


# -- observables as phase-space functions ----------------------------------------------


def qbar0_function() -> PhaseFunction:
    return PhaseFunction(lambda q, p: -q[0] / (2.0 * p[0]), name="Qbar0")


def qbar1_function() -> PhaseFunction:
    return PhaseFunction(lambda q, p: q[1] + p[1] * q[0] / p[0], name="Qbar1")


def barred_variables(model, state: PhaseState) -> tuple[float, float, float, float]:
    """(Qbar^0, Qbar^1, Pbar_0, Pbar_1) at a phase-space point."""
    (u, v), (pu, pv) = state.q, state.p
    if pu == 0:
        raise NoRealSolutionError("barred variables are singular at p_u = 0")
    return -u / (2.0 * pu), v + pv * u / pu, model.constraint(state.q, state.p), pv


@dataclass(frozen=True)
class DriftReport:
    qbar1_drift: float
    pbar0_drift: float
    pbar1_drift: float
    gauge_defect: float
    integrator_drift: float
    bracket_qbar1: float
    bracket_pbar1: float
    bracket_gauge: float
    hj_mismatch: float

    def within(self, factor: float = 10.0, floor: float = 1e-12) -> bool:
        """Observable drifts below factor * max(integrator drift, floor)."""
        bound = factor * max(self.integrator_drift, floor)
        return max(self.qbar1_drift, self.pbar0_drift, self.pbar1_drift) < bound

    def to_dict(self) -> dict:
        return dict(self.__dict__)

    def write_json(self, path: str | Path) -> Path:
        path = Path(path)
        path.write_text(json.dumps(self.to_dict(), indent=2, sort_keys=True) + "\n")
        return path


def conserved_observables(traj: Trajectory, hj: HJSolution) -> DriftReport:
    """Drift of Qbar^1, Pbar_0, Pbar_1 along ``traj`` and the gauge clock check.

    Qbar^0 is not conserved: it advances as N tau, and ``gauge_defect`` gives
    the largest deviation from that.  The brackets {Qbar^1, H}, {Pbar_1, H}
    and {Qbar^0, H} - 1 are evaluated at the initial state.  ``hj_mismatch``
    measures how well the initial state matches the solution's (alpha, E, sign).
    """
    model = traj.model
    if model.dimension != 2:
        raise InvalidArgumentError("conserved_observables works on the (u, v) model")
    vals = np.array([barred_variables(model, s) for s in traj.states])
    taus = traj.taus
    drift = np.max(np.abs(vals - vals[0]), axis=0)
    gauge = float(np.max(np.abs(vals[:, 0] - vals[0, 0] - traj.lapse * (taus - taus[0]))))
    s0 = traj.initial
    H = constraint_function(model)
    b_q1 = poisson_bracket(qbar1_function(), H, s0)
    b_p1 = poisson_bracket(PhaseFunction(lambda q, p: p[1], "p", 1), H, s0)
    b_g = poisson_bracket(qbar0_function(), H, s0) - 1.0
    mismatch = max(
        abs(hj.alpha - s0.p[1]), abs(hj.E - vals[0, 2]), 0.0 if np.sign(s0.p[0]) == hj.sign else float("inf")
    )
    return DriftReport(
        float(drift[1]), float(drift[2]), float(drift[3]), gauge, float(traj.max_drift), b_q1, b_p1, b_g, float(mismatch)
    )


# -- actions ------------------------------------------------------------------------


def _line_integral(P: np.ndarray, Q: np.ndarray) -> float:
    """sum over steps of mean(P) . dQ (exact when P is constant or linear in Q)."""
    dQ = np.diff(Q, axis=0)
    Pm = 0.5 * (P[1:] + P[:-1])
    return float(np.sum(Pm * dQ))


def _trapezoid(y: np.ndarray, x: np.ndarray) -> float:
    return float(np.sum(0.5 * (y[1:] + y[:-1]) * np.diff(x)))


@dataclass(frozen=True)
class ActionReport:
    original_action: float
    new_action: float
    endpoint_term: float
    difference: float
    f_kind: str

    def to_dict(self) -> dict:
        return dict(self.__dict__)


def action_endpoint_difference(traj: Trajectory, hj: HJSolution, f_kind: str = "linear") -> ActionReport:
    """|(S_new - S) - [Qbar Pbar - W + Q^mu P_mu - f]| along the trajectory.

    ``f_kind``: 'linear' uses f = Qbar^1 P_1 + P_1 tau; 'zero' stops after the
    first map, so the new action is int (Pbar dQbar - N Pbar_0) dtau and the
    bracket is [Qbar Pbar - W].
    """
    if f_kind not in ("linear", "zero"):
        raise InvalidArgumentError("f_kind must be 'linear' or 'zero'")
    model = traj.model
    N = traj.lapse
    taus = traj.taus
    qs, ps = traj.qs, traj.ps
    Hs = np.array([model.constraint(q, p) for q, p in zip(qs, ps)])
    S = _line_integral(ps, qs) - N * _trapezoid(Hs, taus)

    bar = np.array([barred_variables(model, s) for s in traj.states])
    Qbar, Pbar = bar[:, :2], bar[:, 2:]
    # W with (alpha, E) = (p_v, H) evaluated at each state equals p . q
    W = np.sum(ps * qs, axis=1)
    bracket = np.sum(Qbar * Pbar, axis=1) - W

    if f_kind == "zero":
        new = _line_integral(Pbar, Qbar) - N * _trapezoid(Pbar[:, 0], taus)
    else:
        P1 = Pbar[:, 1]
        Q1 = Qbar[:, 1] + taus
        Q0, P0 = Qbar[:, 0], Pbar[:, 0]
        f = Qbar[:, 1] * P1 + P1 * taus
        new = _line_integral(np.column_stack([P0, P1]), np.column_stack([Q0, Q1])) - N * _trapezoid(P0, taus) - _trapezoid(P1, taus)
        bracket = bracket + Q1 * P1 - f
    end = float(bracket[-1] - bracket[0])
    return ActionReport(S, new, end, abs((new - S) - end), f_kind)
