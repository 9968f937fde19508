"""Poisson brackets, global phase time tests and canonical transformations.

Bracket convention: ``{f, g} = sum_i df/dq_i dg/dp_i - df/dp_i dg/dq_i``, so a
function ``t`` increases along every trajectory (positive lapse) iff
``{t, H} > 0`` on the constraint surface.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable, Sequence

import numpy as np

from .errors import (
    ConstraintInfeasibleError,
    EvaluationError,
    FactorizationUnsupportedError,
    InvalidArgumentError,
    SingularTransformError,
)
from .model import MinisuperspaceModel, PhaseState, solve_momentum_on_constraint

DEFAULT_MARGIN = 1e-6
ON_CONSTRAINT_TOL = 1e-8


# -- phase-space functions and brackets ---------------------------------------------


@dataclass(frozen=True)
class PhaseFunction:
    """A scalar function of (q, p).  ``kind`` is 'q' or 'p' for plain coordinates."""

    func: Callable[[np.ndarray, np.ndarray], float]
    kind: str = "general"
    index: int = -1
    name: str = ""

    def __call__(self, q, p) -> float:
        return float(self.func(np.asarray(q, float), np.asarray(p, float)))


def coordinate(i: int) -> PhaseFunction:
    return PhaseFunction(lambda q, p: q[i], "q", i, f"q{i}")


def momentum(i: int) -> PhaseFunction:
    return PhaseFunction(lambda q, p: p[i], "p", i, f"p{i}")


def constraint_function(model: MinisuperspaceModel) -> PhaseFunction:
    return PhaseFunction(model.constraint, name="H")


def _as_function(f) -> PhaseFunction:
    return f if isinstance(f, PhaseFunction) else PhaseFunction(f)


def _richardson_derivative(fun: Callable[[float], float], x0: float, h: float) -> float:
    """Central difference extrapolated twice (error O(h^6))."""

    def central(step):
        fp, fm = fun(x0 + step), fun(x0 - step)
        if not (math.isfinite(fp) and math.isfinite(fm)):
            raise EvaluationError(f"non-finite probe at offset {step:g} from {x0:g}")
        return (fp - fm) / (2.0 * step)

    d1, d2, d3 = central(h), central(h / 2), central(h / 4)
    r1 = (4.0 * d2 - d1) / 3.0
    r2 = (4.0 * d3 - d2) / 3.0
    return (16.0 * r2 - r1) / 15.0


def phase_gradient(f: PhaseFunction, q: np.ndarray, p: np.ndarray, rel_step: float = 1e-3):
    """(df/dq, df/dp) by Richardson-extrapolated central differences."""
    n = len(q)
    gq, gp = np.zeros(n), np.zeros(n)
    for i in range(n):
        h = rel_step * max(1.0, abs(q[i]))

        def along_q(v, i=i):
            qq = q.copy()
            qq[i] = v
            return f(qq, p)

        gq[i] = _richardson_derivative(along_q, q[i], h)
        h = rel_step * max(1.0, abs(p[i]))

        def along_p(v, i=i):
            pp = p.copy()
            pp[i] = v
            return f(q, pp)

        gp[i] = _richardson_derivative(along_p, p[i], h)
    return gq, gp


def poisson_bracket(f, g, state: PhaseState) -> float:
    """Canonical bracket {f, g} at ``state``."""
    f, g = _as_function(f), _as_function(g)
    q, p = state.as_arrays()
    n = state.dimension
    for obj in (f, g):
        if obj.kind in ("q", "p") and not 0 <= obj.index < n:
            raise InvalidArgumentError(f"phase-space index {obj.index} out of range")
    if f.kind in ("q", "p") and g.kind in ("q", "p"):
        if f.index != g.index or f.kind == g.kind:
            return 0.0
        return 1.0 if f.kind == "q" else -1.0
    if f.kind in ("q", "p") or g.kind in ("q", "p"):
        plain, other, sign = (f, g, 1.0) if f.kind in ("q", "p") else (g, f, -1.0)
        i = plain.index
        if plain.kind == "q":
            # {q_i, g} = dg/dp_i
            def along(v):
                pp = p.copy()
                pp[i] = v
                return other(q, pp)

            d = _richardson_derivative(along, p[i], 1e-3 * max(1.0, abs(p[i])))
        else:
            # {p_i, g} = -dg/dq_i
            def along(v):
                qq = q.copy()
                qq[i] = v
                return other(qq, p)

            d = -_richardson_derivative(along, q[i], 1e-3 * max(1.0, abs(q[i])))
        return sign * d
    fq, fp = phase_gradient(f, q, p)
    gq, gp = phase_gradient(g, q, p)
    return float(fq @ gp - fp @ gq)


# -- time candidates ------------------------------------------------------------------


@dataclass(frozen=True)
class TimeCandidate:
    """A proposed clock.  Intrinsic: ``sign * q[axis]``.  Extrinsic: a named closed form."""

    kind: str
    axis: int = -1
    sign: int = 1
    name: str = ""
    function: PhaseFunction | None = field(default=None, compare=False)
    params: tuple = ()

    def __post_init__(self):
        if self.kind not in ("intrinsic", "extrinsic"):
            raise InvalidArgumentError(f"candidate kind must be intrinsic or extrinsic, got {self.kind!r}")
        if self.sign not in (1, -1):
            raise InvalidArgumentError("candidate sign must be +1 or -1")
        if self.kind == "intrinsic" and self.axis < 0:
            raise InvalidArgumentError("intrinsic candidates need a valid axis")
        if self.kind == "extrinsic" and self.function is None:
            raise InvalidArgumentError("extrinsic candidates need a closed-form function")

    @classmethod
    def intrinsic(cls, axis: int, sign: int = 1, label: str = "") -> "TimeCandidate":
        return cls("intrinsic", int(axis), int(sign), label or f"{'+' if sign > 0 else '-'}q{axis}")

    @classmethod
    def taub_s(cls, lambda_abs: float, branch: int = 1, sign: int = 1, field_axis: int = 1) -> "TimeCandidate":
        """t = sign * s(phi, p_phi), with s from the sinh canonical transformation."""
        lam = float(lambda_abs)

        def s_of(q, p):
            return sign * branch * math.asinh(p[field_axis] * math.exp(q[field_axis]) / lam)

        return cls(
            "extrinsic", -1, int(sign), f"{'+' if sign > 0 else '-'}s", PhaseFunction(s_of, name="s"),
            (("lambda_abs", lam), ("branch", branch), ("field_axis", field_axis)),
        )

    @classmethod
    def extrinsic(cls, name: str, func: Callable, sign: int = 1) -> "TimeCandidate":
        return cls("extrinsic", -1, int(sign), name, PhaseFunction(lambda q, p: sign * func(q, p), name=name))

    def as_function(self) -> PhaseFunction:
        if self.kind == "intrinsic":
            a, s = self.axis, self.sign
            return PhaseFunction(lambda q, p: s * q[a], name=self.name)
        return self.function

    def bracket(self, model: MinisuperspaceModel, state: PhaseState) -> float:
        if self.kind == "intrinsic":
            # {sign q_a, H} = sign * 2 s_a p_a exactly
            return self.sign * 2.0 * model.metric_signs[self.axis] * state.p[self.axis]
        return poisson_bracket(self.function, constraint_function(model), state)

    def to_dict(self) -> dict:
        d = {"kind": self.kind, "name": self.name, "sign": self.sign}
        if self.kind == "intrinsic":
            d["axis"] = self.axis
        if self.params:
            d["params"] = dict(self.params)
        return d


@dataclass(frozen=True)
class TimeVerdict:
    candidate: TimeCandidate
    is_global: bool
    min_bracket: float
    max_bracket: float
    margin: float
    potential_definite: bool
    reason: str
    witness: PhaseState | None
    samples: tuple[PhaseState, ...] = field(repr=False, default=())

    @property
    def verdict(self) -> str:
        return "global" if self.is_global else "not_global"

    def to_dict(self, include_samples: bool = True) -> dict:
        d = {
            "candidate": self.candidate.to_dict(),
            "verdict": self.verdict,
            "min_bracket": self.min_bracket,
            "max_bracket": self.max_bracket,
            "margin": self.margin,
            "potential_definite": self.potential_definite,
            "reason": self.reason,
            "witness": None if self.witness is None else self.witness.to_dict(),
            "n_samples": len(self.samples),
        }
        if include_samples:
            d["samples"] = [s.to_dict() for s in self.samples]
        return d

    def write_json(self, path: str | Path) -> Path:
        path = Path(path)
        path.write_text(json.dumps(self.to_dict(), indent=2, sort_keys=True) + "\n")
        return path


def sample_on_constraint(
    model: MinisuperspaceModel,
    n: int,
    solve_axis: int | str,
    root: int = 1,
    q_box: tuple[float, float] = (-1.0, 1.0),
    p_box: tuple[float, float] = (-2.0, 2.0),
    seed: int = 0,
    max_tries: int = 100_000,
) -> list[PhaseState]:
    """Uniform samples in a box, projected onto H = 0 by solving for one momentum.

    ``root`` picks the sign of the solved momentum, so all samples lie on one
    sheet.  Infeasible draws are rejected.
    """
    axis = model.axis(solve_axis)
    rng = np.random.default_rng(seed)
    out: list[PhaseState] = []
    tries = 0
    while len(out) < n:
        tries += 1
        if tries > max_tries:
            raise ConstraintInfeasibleError(f"only {len(out)} of {n} feasible samples after {max_tries} draws")
        q = rng.uniform(*q_box, model.dimension)
        p = rng.uniform(*p_box, model.dimension)
        try:
            plus, minus = solve_momentum_on_constraint(model, PhaseState(q, p), axis)
        except ConstraintInfeasibleError:
            continue
        out.append(plus if root > 0 else minus)
    return out


def _infer_solved_axis(samples: Sequence[PhaseState]) -> tuple[int, int] | None:
    """Axis whose momentum keeps one strict sign across all samples (largest margin)."""
    P = np.array([s.p for s in samples])
    best = None
    for i in range(P.shape[1]):
        col = P[:, i]
        if np.all(col > 0) or np.all(col < 0):
            m = float(np.min(np.abs(col)))
            if best is None or m > best[0]:
                best = (m, i, int(np.sign(col[0])))
    return None if best is None else (best[1], best[2])


def _bisect_witness(model, candidate, a: PhaseState, b: PhaseState, solve: tuple[int, int], iters: int = 60):
    """On-constraint state between a ([t,H] > 0) and b ([t,H] <= 0) where the bracket vanishes."""
    axis, root = solve
    qa, pa = a.as_arrays()
    qb, pb = b.as_arrays()

    def state_at(lam):
        st = PhaseState(qa + lam * (qb - qa), pa + lam * (pb - pa))
        plus, minus = solve_momentum_on_constraint(model, st, axis)
        return plus if root > 0 else minus

    lo, hi = 0.0, 1.0
    try:
        for _ in range(iters):
            mid = 0.5 * (lo + hi)
            if candidate.bracket(model, state_at(mid)) > 0:
                lo = mid
            else:
                hi = mid
        return state_at(0.5 * (lo + hi))
    except ConstraintInfeasibleError:
        return b


def intrinsic_time_check(
    model: MinisuperspaceModel,
    candidate: TimeCandidate,
    sample_states: Sequence[PhaseState],
    margin: float = DEFAULT_MARGIN,
    constraint_tol: float = ON_CONSTRAINT_TOL,
) -> TimeVerdict:
    """Decide whether ``candidate`` is a global phase time over the sampled region.

    Global requires ``{t, H} > margin`` on every sample; an intrinsic candidate
    additionally requires a sign-definite potential (decided analytically when
    all coefficients share a sign, otherwise by the samples).  Extrinsic
    candidates take the closed forms of :class:`TimeCandidate`.
    """
    if not sample_states:
        raise InvalidArgumentError("at least one sample state is required")
    if candidate.kind == "intrinsic":
        model.axis(candidate.axis)
    for st in sample_states:
        model._check(st)
        r = model.constraint(st.q, st.p)
        scale = max(1.0, float(np.sum(np.square(st.p))))
        if abs(r) > constraint_tol * scale:
            raise InvalidArgumentError(f"sample state is off the constraint surface (|H| = {abs(r):.3g})")
    brackets = np.array([candidate.bracket(model, st) for st in sample_states])
    samples = tuple(sample_states)

    definite = True
    witness = None
    reason = ""
    if candidate.kind == "intrinsic" and model.potential_sign() == 0 and model.potential:
        vals = np.array([model.potential_value(st.q) for st in sample_states])
        if np.any(vals > 0) and np.any(vals < 0):
            definite = False
            minority = 1.0 if np.sum(vals > 0) < np.sum(vals < 0) else -1.0
            witness = samples[int(np.argmax(minority * vals))]
            reason = "potential changes sign over the sampled region"

    bad = brackets <= margin
    if np.any(bad):
        j_bad = int(np.argmin(brackets))
        witness = samples[j_bad]
        reason = f"[t,H] = {brackets[j_bad]:.3g} not above margin {margin:g}"
        good = np.flatnonzero(~bad)
        solve = _infer_solved_axis(samples)
        if good.size and solve is not None and brackets[j_bad] < 0:
            j_good = int(good[np.argmin(np.linalg.norm(np.array([samples[k].q for k in good]) - samples[j_bad].q, axis=1))])
            witness = _bisect_witness(model, candidate, samples[j_good], samples[j_bad], solve)
            reason = "[t,H] changes sign on the constraint surface"
    is_global = definite and not np.any(bad)
    if is_global:
        reason = "[t,H] bounded away from zero on every sample"
    return TimeVerdict(
        candidate, bool(is_global), float(brackets.min()), float(brackets.max()), margin, definite, reason,
        None if is_global else witness, samples,
    )


# -- canonical maps ------------------------------------------------------------------


@dataclass(frozen=True)
class CanonicalMap:
    """A closed-form canonical transformation with its inverse."""

    name: str
    forward: Callable[[PhaseState], PhaseState] = field(compare=False)
    inverse: Callable[[PhaseState], PhaseState] = field(compare=False)
    params: tuple = ()
    new_labels: tuple[str, ...] = ()

    def __call__(self, state: PhaseState) -> PhaseState:
        return self.forward(state)

    def roundtrip_error(self, state: PhaseState) -> float:
        back = self.inverse(self.forward(state))
        q, p = state.as_arrays()
        q2, p2 = back.as_arrays()
        return float(max(np.max(np.abs(q2 - q)), np.max(np.abs(p2 - p))) / max(1.0, np.max(np.abs(np.r_[q, p]))))

    def jacobian(self, state: PhaseState, rel_step: float = 1e-3) -> np.ndarray:
        """d(Q, P)/d(q, p) by Richardson-extrapolated central differences."""
        z0 = np.r_[state.q, state.p]
        n = state.dimension
        J = np.zeros((2 * n, 2 * n))

        def image(z):
            out = self.forward(PhaseState(z[:n], z[n:], state.tau))
            return np.r_[out.q, out.p]

        for j in range(2 * n):
            h = rel_step * max(1.0, abs(z0[j]))
            cols = []
            for step in (h, h / 2, h / 4):
                zp, zm = z0.copy(), z0.copy()
                zp[j] += step
                zm[j] -= step
                cols.append((image(zp) - image(zm)) / (2 * step))
            r1 = (4 * cols[1] - cols[0]) / 3
            r2 = (4 * cols[2] - cols[1]) / 3
            J[:, j] = (16 * r2 - r1) / 15
        return J

    def symplectic_defect(self, state: PhaseState) -> float:
        """max |J^T Sigma J - Sigma| with the standard symplectic form Sigma."""
        n = state.dimension
        J = self.jacobian(state)
        S = np.block([[np.zeros((n, n)), np.eye(n)], [-np.eye(n), np.zeros((n, n))]])
        return float(np.max(np.abs(J.T @ S @ J - S)))


def _point_map(name, coords, jac, inv_coords, params, labels) -> CanonicalMap:
    """Point transformation Q(q) with momenta P = J^{-T} p, J = dQ/dq."""

    def fwd(st: PhaseState) -> PhaseState:
        q, p = st.as_arrays()
        J = jac(q)
        return PhaseState(coords(q), np.linalg.solve(J.T, p), st.tau)

    def inv(st: PhaseState) -> PhaseState:
        Q, P = st.as_arrays()
        q = inv_coords(Q)
        return PhaseState(q, jac(q).T @ P, st.tau)

    return CanonicalMap(name, fwd, inv, params, labels)


def xy_map(a: float, b: float) -> CanonicalMap:
    """x = (a q1 + b q2)/2, y = (b q1 + a q2)/2 on the first two axes."""
    a, b = float(a), float(b)
    det = a * a - b * b
    if abs(det) < 1e-14 * max(1.0, a * a + b * b):
        raise SingularTransformError(f"xy transform is singular for a = +-b (a={a}, b={b})")
    M = 0.5 * np.array([[a, b], [b, a]])
    Minv = np.linalg.inv(M)
    return _point_map(
        "xy_linear", lambda q: M @ q, lambda q: M, lambda Q: Minv @ Q, (("a", a), ("b", b)), ("x", "y")
    )


def xy_transform(a: float, b: float, state: PhaseState) -> PhaseState:
    return xy_map(a, b).forward(state)


def xy_zeta(A: float, a: float, b: float) -> float:
    """Coefficient of e^{2x} after the xy change and rescaling by 4/(a^2-b^2)."""
    return 4.0 * A / (a * a - b * b)


def xy_constraint_factor(a: float, b: float) -> float:
    """H_original = factor * H_xy, with H_xy = -p_x^2 + p_y^2 + zeta e^{2x}."""
    return 0.25 * (a * a - b * b)


def sinh_generating_map(lambda_abs: float, branch: int = 1, axis: int = 1) -> CanonicalMap:
    """(phi, p_phi) -> (s, p_s) generated by F1(phi, s) = -branch |lambda| e^{-phi} sinh s.

    s = branch * arcsinh(p_phi e^phi / |lambda|), p_s = branch |lambda| e^{-phi} cosh s.
    The other axes are untouched.
    """
    lam = float(lambda_abs)
    if not lam > 0:
        raise InvalidArgumentError("lambda_abs must be positive")
    if branch not in (1, -1):
        raise InvalidArgumentError("branch must be +1 or -1")

    def fwd(st: PhaseState) -> PhaseState:
        q, p = st.as_arrays()
        phi, pphi = q[axis], p[axis]
        s = branch * math.asinh(pphi * math.exp(phi) / lam)
        q[axis], p[axis] = s, branch * lam * math.exp(-phi) * math.cosh(s)
        return PhaseState(q, p, st.tau)

    def inv(st: PhaseState) -> PhaseState:
        q, p = st.as_arrays()
        s, ps = q[axis], p[axis]
        if branch * ps <= 0:
            raise SingularTransformError(f"p_s = {ps} has the wrong sign for branch {branch}")
        phi = -math.log(branch * ps / (lam * math.cosh(s)))
        q[axis], p[axis] = phi, ps * math.tanh(s)
        return PhaseState(q, p, st.tau)

    return CanonicalMap("sinh_generating", fwd, inv, (("lambda_abs", lam), ("branch", branch), ("axis", axis)), ("Omega", "s"))


def sinh_generating_function(lambda_abs: float, branch: int = 1):
    """F1(phi, s) with p_phi = dF1/dphi and p_s = -dF1/ds."""
    kappa = -branch * float(lambda_abs)
    return lambda phi, s: kappa * np.exp(-phi) * np.sinh(s)


def sinh_generating_transform(lambda_abs: float, sign: int, state: PhaseState, axis: int = 1) -> PhaseState:
    return sinh_generating_map(lambda_abs, sign, axis).forward(state)


def uv_map(a: float, b: float, A: float) -> CanonicalMap:
    """Embedding coordinates turning -p1^2 + p2^2 + A e^{a q1 + b q2} into a constant-potential form.

    With X = (a q1 + b q2)/2, Y = (b q1 + a q2)/2 and alpha = sqrt|A|:
    u = alpha e^X cosh Y, v = alpha e^X sinh Y when a^2 > b^2.  For a^2 < b^2 the
    roles of cosh and sinh are exchanged so that the constraint factor stays
    positive.
    """
    a, b, A = float(a), float(b), float(A)
    if A == 0.0:
        raise SingularTransformError("uv transform needs A != 0")
    M = xy_map(a, b)  # raises for a = +-b
    del M
    alpha = math.sqrt(abs(A))
    swap = a * a < b * b
    Mxy = 0.5 * np.array([[a, b], [b, a]])
    Mxy_inv = np.linalg.inv(Mxy)

    def coords(q):
        X, Y = Mxy @ q[:2]
        c, s = alpha * math.exp(X) * math.cosh(Y), alpha * math.exp(X) * math.sinh(Y)
        return np.array([s, c]) if swap else np.array([c, s])

    def jac(q):
        u, v = coords(q)
        return np.array([[u, v], [v, u]]) @ Mxy

    def inv_coords(Q):
        u, v = Q
        big, small = (v, u) if swap else (u, v)
        if big <= abs(small):
            raise SingularTransformError(f"(u, v) = ({u}, {v}) outside the image of the embedding")
        X = 0.5 * math.log((big * big - small * small) / (alpha * alpha))
        Y = math.atanh(small / big)
        return Mxy_inv @ np.array([X, Y])

    return _point_map("uv_embedding", coords, jac, inv_coords, (("a", a), ("b", b), ("A", A), ("swap", swap)), ("u", "v"))


def uv_transform(a: float, b: float, A: float, state: PhaseState) -> PhaseState:
    return uv_map(a, b, A).forward(state)


def uv_parameters(a: float, b: float, A: float) -> tuple[int, float]:
    """(eta, m^2) of the target constraint -p_u^2 + p_v^2 + eta m^2."""
    if A == 0 or a * a == b * b:
        raise SingularTransformError("uv parameters need A != 0 and a != +-b")
    return (1 if A > 0 else -1), 4.0 / abs(a * a - b * b)


def uv_constraint_factor(a: float, b: float, A: float, q) -> float:
    """Positive factor with H_original(q, p) = factor * H_uv(u, v, p_u, p_v)."""
    X = 0.5 * (a * q[0] + b * q[1])
    return 0.25 * abs(a * a - b * b) * abs(A) * math.exp(2.0 * X)


# -- factorization into sheets --------------------------------------------------------


@dataclass(frozen=True)
class SheetHamiltonian:
    """One factor K = p_clock + branch * h of ``H = sigma (p_clock^2 - h^2)``.

    ``clock_sign`` is the orientation of the physical time on this sheet,
    t = clock_sign * q[clock_axis].  ``branch`` is +1 for K+ and -1 for K-.
    """

    model: MinisuperspaceModel
    clock_axis: int
    branch: int
    clock_sign: int
    time_dependent: bool

    @property
    def label(self) -> str:
        return "K+" if self.branch > 0 else "K-"

    @property
    def sigma(self) -> int:
        return self.model.metric_signs[self.clock_axis]

    def h_squared(self, q, p) -> float:
        p = np.array(p, dtype=float)
        p[self.clock_axis] = 0.0
        return -self.sigma * self.model.constraint(q, p)

    def h(self, q, p) -> float:
        hh = self.h_squared(q, p)
        if hh < 0:
            raise FactorizationUnsupportedError(f"h^2 = {hh:.3g} < 0", witness=(tuple(q), tuple(p)))
        return math.sqrt(hh)

    def value(self, q, p) -> float:
        return float(p[self.clock_axis]) + self.branch * self.h(q, p)

    def describe(self) -> str:
        m = self.model
        parts = []
        for i, lab in enumerate(m.coordinate_labels):
            if i != self.clock_axis:
                parts.append(f"p_{lab}^2")
        for t in m.potential:
            coeff = -self.sigma * t.coefficient
            expo = " + ".join(f"{e:g} {lab}" for e, lab in zip(t.exponents, m.coordinate_labels) if e != 0)
            parts.append(f"{coeff:g} exp({expo})" if expo else f"{coeff:g}")
        clock = m.coordinate_labels[self.clock_axis]
        sgn = "+" if self.branch > 0 else "-"
        return f"{self.label} = p_{clock} {sgn} sqrt({' + '.join(parts)})"


def factorize_constraint(
    model: MinisuperspaceModel,
    clock_axis: int | str,
    plus_clock_sign: int = 1,
    probe_box: tuple[float, float] = (-5.0, 5.0),
    probe_points: int = 21,
) -> tuple[SheetHamiltonian, SheetHamiltonian]:
    """Split the constraint into K+ = p_0 + h and K- = p_0 - h.

    The clock orientation defaults to t = +q0 on K+ (states e^{-i E q0} solving
    i d/dq0 psi = h psi) and t = -q0 on K-; ``plus_clock_sign = -1`` selects the
    opposite orientation.  The sheet is flagged time dependent if any potential
    term depends on the clock coordinate.
    """
    c = model.axis(clock_axis)
    sigma = model.metric_signs[c]
    for i, s in enumerate(model.metric_signs):
        if i != c and -sigma * s < 0:
            raise FactorizationUnsupportedError(
                f"momentum p_{model.coordinate_labels[i]} enters h^2 with a negative sign",
                witness=(tuple([0.0] * model.dimension), tuple(1.0 if j == i else 0.0 for j in range(model.dimension))),
            )
    bad_terms = [t for t in model.potential if -sigma * t.coefficient < 0]
    if bad_terms:
        zero = tuple([0.0] * model.dimension)
        if len(bad_terms) == len(model.potential):
            raise FactorizationUnsupportedError("potential term under the square root is negative", witness=(zero, zero))
        axes = np.linspace(*probe_box, probe_points)
        grids = np.meshgrid(*([axes] * model.dimension), indexing="ij")
        for q in np.stack([g.ravel() for g in grids], axis=1):
            if -sigma * model.potential_value(q) < 0:
                raise FactorizationUnsupportedError(
                    "h^2 becomes negative on the probed domain", witness=(tuple(q), zero)
                )
    td = any(t.exponents[c] != 0.0 for t in model.potential)
    plus = SheetHamiltonian(model, c, 1, int(plus_clock_sign), td)
    minus = SheetHamiltonian(model, c, -1, -int(plus_clock_sign), td)
    return plus, minus
