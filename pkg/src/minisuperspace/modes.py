"""Separated mode solutions of the Wheeler-DeWitt equation and checks on them.

Every model here separates into factors solving

    f''(q) + (omega^2 + A e^{alpha q}) f(q) = 0,

which is Bessel's equation in ``r = (2 sqrt|A| / |alpha|) e^{alpha q / 2}`` with
order ``nu = 2 i omega / |alpha|``: modified functions (I, K) for A < 0 and
ordinary ones (J, N) for A > 0.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable, Mapping, Sequence

import numpy as np

from . import special
from .errors import GridTooCoarseError, InvalidArgumentError, UndecidedError
from .grids import Grid1D, GridWavefunction
from .model import MinisuperspaceModel

_FAMILY_FUNCS = {
    "I": special.mod_bessel_I_imag,
    "K": special.mod_bessel_K_imag,
    "J": special.bessel_J_imag,
    "N": special.bessel_N_imag,
}


def exp_mode_argument(A: float, alpha: float, q) -> np.ndarray:
    return (2.0 * math.sqrt(abs(A)) / abs(alpha)) * np.exp(0.5 * alpha * np.asarray(q, float))


def exp_mode_factor(family: str, A: float, alpha: float, omega: float, q, derivative: bool = False):
    """Solution ``f(q)`` of f'' + (omega^2 + A e^{alpha q}) f = 0 from one Bessel family.

    ``derivative=True`` returns df/dq instead.
    """
    if A == 0 or alpha == 0:
        raise InvalidArgumentError("exponential mode factor needs A != 0 and alpha != 0")
    if family in ("I", "K") and A > 0 or family in ("J", "N") and A < 0:
        raise InvalidArgumentError(f"family {family} does not solve the equation for A = {A}")
    nu = 2.0 * omega / abs(alpha)
    r = exp_mode_argument(A, alpha, q)
    fn = _FAMILY_FUNCS[family]
    if not derivative:
        return fn(nu, r)
    # dr/dq = alpha r / 2
    return fn(nu, r, derivative=True) * (0.5 * alpha * r)


@dataclass(frozen=True)
class ModeSpectrum:
    """Coefficient families sampled on a common frequency grid."""

    omegas: np.ndarray
    coefficients: Mapping[str, np.ndarray] = field(default_factory=dict)

    def __post_init__(self):
        w = np.atleast_1d(np.asarray(self.omegas, float))
        coeffs = {k: np.atleast_1d(np.asarray(v, complex)) for k, v in self.coefficients.items()}
        for k, v in coeffs.items():
            if v.shape != w.shape:
                raise InvalidArgumentError(f"coefficient family {k!r} has shape {v.shape}, expected {w.shape}")
        object.__setattr__(self, "omegas", w)
        object.__setattr__(self, "coefficients", coeffs)

    def __len__(self):
        return len(self.omegas)

    def entry(self, k: int) -> dict:
        return {name: complex(v[k]) for name, v in self.coefficients.items()}

    def subset(self, indices) -> "ModeSpectrum":
        idx = np.asarray(indices, int)
        return ModeSpectrum(self.omegas[idx], {k: v[idx] for k, v in self.coefficients.items()})


# -- closed-form modes ----------------------------------------------------------


CASES = ("zeta_pos", "zeta_neg", "taub")


def _coef(coeffs: Mapping[str, complex], *names) -> complex:
    for n in names:
        if n in coeffs:
            return complex(coeffs[n])
    return 0.0


def mode_factors(case: str, omega: float, coeffs: Mapping[str, complex], params: Mapping[str, float]):
    """The two one-dimensional factors (f0(q0), f1(q1)) of a separated mode.

    zeta_pos / zeta_neg work in (x, y):
        [a+ e^{i w y} + a- e^{-i w y}] [b+ J|I_{iw}(sqrt|zeta| e^x) + b- N|K_{iw}(...)]
    taub works in (Omega, phi):
        [a I_{iw}(|lam| e^{-phi}) + b K_{iw}(|lam| e^{-phi})]
        [c I_{iw/3}(sqrt|2 cbar| e^{3 Omega}/3) + d K_{iw/3}(...)]
    with 'atilde' as shorthand for a = atilde, d = 1.
    """
    if case not in CASES:
        raise InvalidArgumentError(f"unknown mode case {case!r}; expected one of {CASES}")
    if case in ("zeta_pos", "zeta_neg"):
        zeta = float(params["zeta"])
        if (zeta > 0) != (case == "zeta_pos") or zeta == 0:
            raise InvalidArgumentError(f"case {case} is inconsistent with zeta = {zeta}")
        ap, am = _coef(coeffs, "a+", "a_plus"), _coef(coeffs, "a-", "a_minus")
        bp, bm = _coef(coeffs, "b+", "b_plus"), _coef(coeffs, "b-", "b_minus")
        first, second = ("J", "N") if zeta > 0 else ("I", "K")

        def f0(x, derivative=False):
            out = np.zeros(np.shape(x), complex)
            for c, fam in ((bp, first), (bm, second)):
                if c != 0:
                    out = out + c * exp_mode_factor(fam, zeta, 2.0, omega, x, derivative)
            return out

        def f1(y, derivative=False):
            y = np.asarray(y, float)
            ep, em = np.exp(1j * omega * y), np.exp(-1j * omega * y)
            if derivative:
                return 1j * omega * (ap * ep - am * em)
            return ap * ep + am * em

        return f0, f1

    cbar, lam = float(params["cbar"]), float(params["lam"])
    if cbar == 0 or lam == 0:
        raise InvalidArgumentError("taub modes need cbar != 0 and lambda != 0")
    if "atilde" in coeffs:
        a, b, c, d = complex(coeffs["atilde"]), 0.0, 0.0, 1.0
    else:
        a, b, c, d = (_coef(coeffs, k) for k in "abcd")
    omega_fams = ("I", "K") if cbar < 0 else ("J", "N")

    def f0(Om, derivative=False):
        out = np.zeros(np.shape(Om), complex)
        for coef, fam in ((c, omega_fams[0]), (d, omega_fams[1])):
            if coef != 0:
                out = out + coef * exp_mode_factor(fam, 2.0 * cbar, 6.0, omega, Om, derivative)
        return out

    def f1(phi, derivative=False):
        out = np.zeros(np.shape(phi), complex)
        for coef, fam in ((a, "I"), (b, "K")):
            if coef != 0:
                out = out + coef * exp_mode_factor(fam, -lam * lam, -2.0, omega, phi, derivative)
        return out

    return f0, f1


def wdw_mode_value(case: str, omega: float, coeffs: Mapping[str, complex], point, params: Mapping[str, float]):
    """Closed-form mode value at ``point = (q0, q1)`` (scalars or broadcastable arrays)."""
    f0, f1 = mode_factors(case, omega, coeffs, params)
    q0, q1 = (np.asarray(c, float) for c in point)
    v = f0(q0) * f1(q1)
    return complex(v) if v.ndim == 0 else v


def mode_on_grid(case, omega, coeffs, params, grids: Sequence[Grid1D]) -> GridWavefunction:
    """Separated mode sampled on the product grid (evaluates each factor once per axis)."""
    g0, g1 = grids
    f0, f1 = mode_factors(case, omega, coeffs, params)
    return GridWavefunction((g0, g1), np.outer(f0(g0.points), f1(g1.points)))


def case_model(case: str, params: Mapping[str, float]) -> MinisuperspaceModel:
    from .model import taub_model, xy_model

    if case == "taub":
        return taub_model(params["cbar"], params["lam"])
    return xy_model(params["zeta"])


# -- Wheeler-DeWitt residual ------------------------------------------------------


@dataclass(frozen=True)
class WDWResidual:
    residual: float
    relative: float
    grids: tuple[Grid1D, ...]
    order: float | None = None
    history: tuple[float, ...] = ()

    def to_dict(self) -> dict:
        return {
            "residual": self.residual,
            "relative": self.relative,
            "order": self.order,
            "history": list(self.history),
            "grids": [g.to_dict() for g in self.grids],
        }

    def write_json(self, path: str | Path) -> Path:
        path = Path(path)
        path.write_text(json.dumps(self.to_dict(), indent=2, sort_keys=True) + "\n")
        return path


def _check_resolution(model: MinisuperspaceModel, grids: Sequence[Grid1D], limit: float = 0.5):
    for i, g in enumerate(grids):
        rates = [abs(t.exponents[i]) for t in model.potential]
        worst = max(rates, default=0.0) * g.spacing
        if worst >= limit:
            raise GridTooCoarseError(
                f"potential varies by a factor e^{worst:.3g} per cell along {g.label}; refine below spacing {limit / max(rates):.3g}"
            )


def wdw_apply(values: np.ndarray, model: MinisuperspaceModel, grids: Sequence[Grid1D]) -> np.ndarray:
    """(d0^2 - d1^2 + V) psi on interior points, with 3-point second differences per axis."""
    g0, g1 = grids
    v = values
    d00 = (v[2:, 1:-1] - 2.0 * v[1:-1, 1:-1] + v[:-2, 1:-1]) / g0.spacing**2
    d11 = (v[1:-1, 2:] - 2.0 * v[1:-1, 1:-1] + v[1:-1, :-2]) / g1.spacing**2
    Q0, Q1 = np.meshgrid(g0.points[1:-1], g1.points[1:-1], indexing="ij")
    V = np.zeros_like(Q0)
    for t in model.potential:
        V += t.coefficient * np.exp(t.exponents[0] * Q0 + t.exponents[1] * Q1)
    # Scaled constraint -p0^2 + p1^2 + V with p = -i d gives d0^2 - d1^2 + V.
    return -model.metric_signs[0] * d00 - model.metric_signs[1] * d11 + V * v[1:-1, 1:-1]


def wdw_residual(psi: GridWavefunction, model: MinisuperspaceModel) -> WDWResidual:
    """Grid-scaled L2 norm of the Wheeler-DeWitt operator applied to ``psi``."""
    if len(psi.grids) != 2 or model.dimension != 2:
        raise InvalidArgumentError("wdw_residual works on two-dimensional models and grids")
    _check_resolution(model, psi.grids)
    r = wdw_apply(psi.values, model, psi.grids)
    vol = psi.cell_volume()
    res = float(np.sqrt(np.sum(np.abs(r) ** 2) * vol))
    scale = float(np.sqrt(np.sum(np.abs(psi.values[1:-1, 1:-1]) ** 2) * vol))
    return WDWResidual(res, res / scale if scale > 0 else 0.0, psi.grids)


def wdw_convergence(
    sampler: Callable[[Sequence[Grid1D]], GridWavefunction],
    model: MinisuperspaceModel,
    grids: Sequence[Grid1D],
    refinements: int = 2,
) -> WDWResidual:
    """Residuals under repeated halving of the spacing; ``order`` is the last observed rate.

    ``history`` lists the residual at each resolution.
    """
    hist = []
    base = tuple(grids)
    g = base
    for k in range(refinements + 1):
        psi = sampler(g)
        _check_resolution(model, g)
        # compare on the coarse interior points only, so every level sees the same set
        stride = 2**k
        r = wdw_apply(psi.values, model, g)[stride - 1 :: stride, stride - 1 :: stride]
        vol = np.prod([b.spacing for b in base])
        res = float(np.sqrt(np.sum(np.abs(r) ** 2) * vol))
        scale = float(np.sqrt(np.sum(np.abs(psi.values[::stride, ::stride][1:-1, 1:-1]) ** 2) * vol))
        hist.append(WDWResidual(res, res / scale if scale > 0 else 0.0, g))
        g = tuple(x.refined(2) for x in g)
    vals = [h.residual for h in hist]
    orders = [math.log2(vals[k] / vals[k + 1]) for k in range(len(vals) - 1) if vals[k + 1] > 0]
    last = hist[-1]
    return WDWResidual(last.residual, last.relative, last.grids, orders[-1] if orders else None, tuple(vals))


def observed_orders(result: WDWResidual) -> list[float]:
    v = result.history
    return [math.log2(v[k] / v[k + 1]) for k in range(len(v) - 1)]


# -- boundary selection from asymptotic phase behaviour ------------------------------


@dataclass(frozen=True)
class AsymptoticMode:
    """A candidate factor ``function(q)`` of frequency ``omega`` along the clock coordinate."""

    name: str
    omega: float
    function: Callable[[np.ndarray], np.ndarray] = field(compare=False)


@dataclass(frozen=True)
class PhaseFit:
    name: str
    single_residual: float
    single_reverse_residual: float
    two_residual: float
    amplitudes: tuple[complex, complex]
    accepted: bool
    reason: str

    def to_dict(self) -> dict:
        return {
            "name": self.name,
            "single_residual": self.single_residual,
            "single_reverse_residual": self.single_reverse_residual,
            "two_residual": self.two_residual,
            "amplitude_plus": [self.amplitudes[0].real, self.amplitudes[0].imag],
            "amplitude_minus": [self.amplitudes[1].real, self.amplitudes[1].imag],
            "accepted": self.accepted,
            "reason": self.reason,
        }


def _lstsq_residual(B: np.ndarray, f: np.ndarray):
    coef, *_ = np.linalg.lstsq(B, f, rcond=None)
    return coef, float(np.linalg.norm(B @ coef - f) / np.linalg.norm(f))


def fit_phase(values: np.ndarray, q: np.ndarray, omega: float, orientation: int = 1):
    """Least-squares fits of samples by c e^{-i w t}, c e^{+i w t}, and a e^{i w t} + b e^{-i w t}.

    ``t = orientation * q``.  Returns (single, reverse, two, (a, b)) with
    relative residuals.
    """
    t = orientation * np.asarray(q, float)
    f = np.asarray(values, complex)
    if np.linalg.norm(f) == 0:
        raise InvalidArgumentError("cannot fit the phase of a vanishing mode")
    neg = np.exp(-1j * omega * t)[:, None]
    pos = np.exp(1j * omega * t)[:, None]
    _, r1 = _lstsq_residual(neg, f)
    _, r1r = _lstsq_residual(pos, f)
    if omega == 0:
        return r1, r1r, r1, (0.0j, complex(np.mean(f)))
    c2, r2 = _lstsq_residual(np.hstack([pos, neg]), f)
    return r1, r1r, r2, (complex(c2[0]), complex(c2[1]))


def boundary_select(
    modes: Sequence[AsymptoticMode],
    region: tuple[float, float],
    n: int = 400,
    orientation: int = 1,
    single_tol: float = 1e-3,
    improvement: float = 10.0,
) -> tuple[list[AsymptoticMode], list[PhaseFit]]:
    """Keep the modes behaving as a single factor e^{-i E t} where the potential vanishes.

    Fits use the last quarter of ``region`` (the end nearest ``region[1]``).
    A mode is accepted when the single-frequency residual is below
    ``single_tol``; it is rejected when the two-frequency model improves the
    residual by at least ``improvement`` or when it fits the reversed factor
    e^{+i E t}.  Anything else raises :class:`UndecidedError`.
    """
    lo, hi = region
    q = np.linspace(lo + 0.75 * (hi - lo), hi, max(16, n // 4))
    kept, fits = [], []
    for m in modes:
        vals = np.asarray(m.function(q), complex)
        r1, r1r, r2, amps = fit_phase(vals, q, m.omega, orientation)
        if m.omega == 0:
            ok = r1 < single_tol
            fit = PhaseFit(m.name, r1, r1r, r2, amps, ok, "zero frequency" if ok else "not constant")
        elif r1 < single_tol:
            fit = PhaseFit(m.name, r1, r1r, r2, amps, True, "single factor e^{-iEt}")
        elif r1r < single_tol:
            fit = PhaseFit(m.name, r1, r1r, r2, amps, False, "single factor e^{+iEt} (opposite clock)")
        elif r2 * improvement <= min(r1, r1r):
            fit = PhaseFit(m.name, r1, r1r, r2, amps, False, "two-frequency combination")
        else:
            raise UndecidedError(
                f"mode {m.name!r}: single-frequency residual {r1:.3g}, two-frequency residual {r2:.3g}",
                fits={"single": r1, "single_reverse": r1r, "two": r2},
            )
        fits.append(fit)
        if fit.accepted:
            kept.append(m)
    return kept, fits


# -- direct sum of the two sheets --------------------------------------------------


@dataclass(frozen=True)
class DirectSumSplit:
    plus: GridWavefunction
    minus: GridWavefunction
    coefficients_plus: np.ndarray
    coefficients_minus: np.ndarray
    reconstruction_error: float
    condition_number: float


def direct_sum_split(
    psi: GridWavefunction,
    omegas: Sequence[float],
    space_factor: Callable[[float, np.ndarray], np.ndarray],
    clock_axis: int = 1,
    plus_sign: int = -1,
) -> DirectSumSplit:
    """Project ``psi`` onto {e^{plus_sign i w t} F_w} (K+ kernel) and {e^{-plus_sign i w t} F_w} (K- kernel).

    ``space_factor(omega, q)`` gives the stationary factor along the non-clock
    axis.  The positive-frequency part e^{-i w t} solves i d/dt psi = h psi, so
    ``plus_sign=-1`` matches the K+ orientation used by :mod:`quantum`.
    """
    if len(psi.grids) != 2:
        raise InvalidArgumentError("direct_sum_split needs a two-dimensional wavefunction")
    t = psi.grids[clock_axis].points
    space = psi.grids[1 - clock_axis].points
    cols_p, cols_m = [], []
    for w in omegas:
        F = np.asarray(space_factor(w, space), complex)
        ep, em = np.exp(plus_sign * 1j * w * t), np.exp(-plus_sign * 1j * w * t)
        if clock_axis == 1:
            cols_p.append(np.outer(F, ep).ravel())
            cols_m.append(np.outer(F, em).ravel())
        else:
            cols_p.append(np.outer(ep, F).ravel())
            cols_m.append(np.outer(em, F).ravel())
    B = np.column_stack(cols_p + cols_m)
    f = psi.values.ravel()
    coef, *_ = np.linalg.lstsq(B, f, rcond=None)
    k = len(omegas)
    plus = (B[:, :k] @ coef[:k]).reshape(psi.values.shape)
    minus = (B[:, k:] @ coef[k:]).reshape(psi.values.shape)
    err = float(np.linalg.norm(plus + minus - psi.values) / np.linalg.norm(psi.values))
    cond = float(np.linalg.cond(B))
    mk = lambda v: GridWavefunction(psi.grids, v, clock_axis)
    return DirectSumSplit(mk(plus), mk(minus), coef[:k], coef[k:], err, cond)
