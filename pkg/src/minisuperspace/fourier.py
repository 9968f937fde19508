"""Integral transforms whose kernels e^{i F1(q, Q)} implement canonical maps.

    Psi(q) = N int dQ e^{i F1(q, Q)} Phi(Q)
    Phi(Q) = N' int dq |d^2 F1 / dq dQ| e^{-i F1(q, Q)} Psi(q)

Two kernels are provided: the plain exchange F1 = q Q and the sinh kernel
F1(phi, s) = kappa e^{-phi} sinh s with kappa = -branch |lambda|.

For the sinh kernel the real ``s`` line does not give the I-type states: with
z = kappa e^{-phi},

    int_R e^{i z sinh s - i w s} ds = 2 e^{sgn(z) pi w / 2} K_{iw}(|z|).

The I-type correspondence comes from the loop contour
s = w - i sgn(z) pi/2, with w running from inf - i pi to -i pi, up to +i pi and
back out to inf + i pi, on which

    int_C e^{i z sinh s - i w s} ds = 2 pi i e^{-sgn(z) pi w / 2} I_{iw}(|z|).

Both contours are available; see :func:`generalized_fourier`.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable, Mapping

import numpy as np

from .errors import InvalidArgumentError, QuadratureError
from .grids import Grid1D, GridWavefunction

_FD8 = np.array([1 / 280, -4 / 105, 1 / 5, -4 / 5, 0.0, 4 / 5, -1 / 5, 4 / 105, -1 / 280])
_FD8_2 = np.array([-1 / 560, 8 / 315, -1 / 5, 8 / 5, -205 / 72, 8 / 5, -1 / 5, 8 / 315, -1 / 560])


@dataclass(frozen=True)
class GeneratingKernel:
    """Closed-form F1(q, Q) and its mixed second derivative."""

    name: str
    F1: Callable = field(compare=False)
    mixed_second: Callable = field(compare=False)
    params: tuple = ()

    def phase(self, q, Q):
        return np.exp(1j * self.F1(q, Q))

    def mixed_second_defect(self, q, Q, step: float = 1e-2) -> float:
        """|analytic d^2F1/dqdQ - finite-difference probe| relative to max(1, |value|).

        The probe is the 4-point cross difference, Richardson-extrapolated twice.
        """
        f = self.F1

        def cross(h):
            return (f(q + h, Q + h) - f(q + h, Q - h) - f(q - h, Q + h) + f(q - h, Q - h)) / (4 * h * h)

        d1, d2, d3 = cross(step), cross(step / 2), cross(step / 4)
        r1, r2 = (4 * d2 - d1) / 3, (4 * d3 - d2) / 3
        fd = (16 * r2 - r1) / 15
        exact = self.mixed_second(q, Q)
        return float(np.max(np.abs(fd - exact) / np.maximum(1.0, np.abs(exact))))


def fourier_exchange_kernel() -> GeneratingKernel:
    return GeneratingKernel("fourier_exchange", lambda q, Q: q * Q, lambda q, Q: np.ones_like(np.asarray(q * Q, float)))


def taub_sinh_kernel(lambda_abs: float, branch: int = 1) -> GeneratingKernel:
    """F1(phi, s) = -branch |lambda| e^{-phi} sinh s (generates the sinh canonical map)."""
    lam = float(lambda_abs)
    if not lam > 0:
        raise InvalidArgumentError("lambda_abs must be positive")
    if branch not in (1, -1):
        raise InvalidArgumentError("branch must be +1 or -1")
    kappa = -branch * lam
    return GeneratingKernel(
        "taub_sinh",
        lambda phi, s: kappa * np.exp(-phi) * np.sinh(s),
        lambda phi, s: -kappa * np.exp(-phi) * np.cosh(s),
        (("lambda_abs", lam), ("branch", branch), ("kappa", kappa)),
    )


# -- kernel condition ---------------------------------------------------------------


@dataclass(frozen=True)
class PolynomialOperator:
    """sum_k c_k(x) p^k with p = momentum_sign * i d/dx (momentum_sign=-1 gives -i d/dx)."""

    coefficients: Mapping[int, Callable] = field(compare=False)
    momentum_sign: int = -1

    def __post_init__(self):
        if any(k not in (0, 1, 2) for k in self.coefficients):
            raise InvalidArgumentError("only powers 0, 1, 2 of the momentum are supported")


def kinetic_plus_potential(potential: Callable | None = None, momentum_sign: int = -1, kinetic: float = 1.0):
    """kinetic * p^2 + V(x)."""
    coeffs = {2: lambda x: kinetic * np.ones_like(x)}
    if potential is not None:
        coeffs[0] = potential
    return PolynomialOperator(coeffs, momentum_sign)


def multiplication(potential: Callable) -> PolynomialOperator:
    return PolynomialOperator({0: potential})


def _apply_on_kernel(op: PolynomialOperator, kernel: GeneratingKernel, q, Q, axis: int, step: float):
    """op acting on e^{i F1} along ``axis`` (0: q, 1: Q), 8th-order differences at offset points."""
    f = lambda dq, dQ: kernel.phase(q + dq, Q + dQ)
    offs = np.arange(-4, 5) * step
    samples = [f(o, 0.0) if axis == 0 else f(0.0, o) for o in offs]
    x = q if axis == 0 else Q
    out = np.zeros(np.broadcast(q, Q).shape, complex)
    for k, c in op.coefficients.items():
        if k == 0:
            d = samples[4]
        elif k == 1:
            d = sum(w * s for w, s in zip(_FD8, samples)) / step
        else:
            d = sum(w * s for w, s in zip(_FD8_2, samples)) / step**2
        out = out + c(x) * (op.momentum_sign * 1j) ** k * d
    return out


def kernel_condition_residual(
    kernel: GeneratingKernel,
    H_q: PolynomialOperator,
    H_Q: PolynomialOperator,
    q_grid: Grid1D,
    Q_grid: Grid1D,
    step: float = 1e-2,
) -> float:
    """max |H_q(-i d_q, q) e^{iF1} - H_Q(i d_Q, Q) e^{iF1}| over the sample grid."""
    q, Q = np.meshgrid(q_grid.points, Q_grid.points, indexing="ij")
    lhs = _apply_on_kernel(H_q, kernel, q, Q, 0, step)
    rhs = _apply_on_kernel(H_Q, kernel, q, Q, 1, step)
    return float(np.max(np.abs(lhs - rhs)))


# -- quadrature --------------------------------------------------------------------


def cosine_taper(x: np.ndarray, lo: float, hi: float, fraction: float = 0.1) -> np.ndarray:
    """1 in the middle, rising as (1 - cos)/2 over ``fraction`` of the window at each end."""
    L = fraction * (hi - lo)
    w = np.ones_like(x, dtype=float)
    if L <= 0:
        return w
    a = (x - lo) / L
    b = (hi - x) / L
    w = np.where(a < 1, 0.5 * (1 - np.cos(np.pi * np.clip(a, 0, 1))), w)
    w = np.where(b < 1, w * 0.5 * (1 - np.cos(np.pi * np.clip(b, 0, 1))), w)
    return w


def gauss_panels(lo: float, hi: float, panels: int, nodes: int = 16):
    """Nodes and weights of a composite Gauss-Legendre rule."""
    x0, w0 = np.polynomial.legendre.leggauss(nodes)
    edges = np.linspace(lo, hi, panels + 1)
    half = 0.5 * np.diff(edges)
    mid = 0.5 * (edges[1:] + edges[:-1])
    x = (mid[:, None] + half[:, None] * x0[None, :]).ravel()
    w = (half[:, None] * w0[None, :]).ravel()
    return x, w


def composite_gauss(integrand: Callable, lo: float, hi: float, panels: int, nodes: int = 16):
    """(value, estimate) comparing ``panels`` against ``2 panels``; integrand maps nodes to rows."""
    x, w = gauss_panels(lo, hi, panels, nodes)
    coarse = integrand(x) @ w
    x, w = gauss_panels(lo, hi, 2 * panels, nodes)
    fine = integrand(x) @ w
    return fine, np.abs(fine - coarse)


# -- transforms --------------------------------------------------------------------


@dataclass(frozen=True)
class TransformReport:
    kernel: str
    window: tuple[float, float]
    contour: str
    quadrature_estimate: float
    window_sensitivity: float
    normalization: complex
    fitted_constant: complex | None = None
    fit_error: float | None = None

    def to_dict(self) -> dict:
        d = dict(self.__dict__)
        d["normalization"] = [self.normalization.real, self.normalization.imag]
        if self.fitted_constant is not None:
            d["fitted_constant"] = [self.fitted_constant.real, self.fitted_constant.imag]
        d["window"] = list(self.window)
        return d

    def write_json(self, path: str | Path) -> Path:
        path = Path(path)
        path.write_text(json.dumps(self.to_dict(), indent=2, sort_keys=True) + "\n")
        return path


def _default_normalization(kernel: GeneratingKernel) -> complex:
    return 1.0 / math.sqrt(2.0 * math.pi) if kernel.name == "fourier_exchange" else 1.0


def _window_transform(kernel, src, q, lo, hi, panels, taper, sign, jacobian, swap):
    """Tapered real-window quadrature; Gauss panels for callables, trapezoid for samples."""

    def kernel_rows(x):
        # rows: output points, columns: quadrature nodes; ``swap`` integrates over the first argument
        a, b = (x[None, :], q[:, None]) if swap else (q[:, None], x[None, :])
        k = np.exp(sign * 1j * kernel.F1(a, b))
        if jacobian:
            k = k * np.abs(kernel.mixed_second(a, b))
        return k

    if callable(src):
        integrand = lambda x: kernel_rows(x) * (src(x) * cosine_taper(x, lo, hi, taper))[None, :]
        return composite_gauss(integrand, lo, hi, panels)
    g = src.grid
    x = g.points
    keep = (x >= lo - 1e-12) & (x <= hi + 1e-12)
    x, v = x[keep], src.values[keep]
    rows = kernel_rows(x) * (v * cosine_taper(x, lo, hi, taper))[None, :]
    w = np.full(len(x), g.spacing)
    w[[0, -1]] *= 0.5
    fine = rows @ w
    # trapezoid on every second sample for the estimate
    x2 = rows[:, ::2]
    w2 = np.full(x2.shape[1], 2 * g.spacing)
    w2[[0, -1]] *= 0.5
    return fine, np.abs(fine - x2 @ w2)


def _hankel_transform(kernel, func, phi, legs, panels):
    """Loop contour for the sinh kernel (see module docstring)."""
    kappa = dict(kernel.params)["kappa"]
    sigma = 1.0 if kappa > 0 else -1.0
    shift = -1j * sigma * 0.5 * math.pi

    def leg(path, dpath, a, b, n):
        def integrand(t):
            s = path(t) + shift
            vals = np.exp(1j * kernel.F1(phi[:, None], s[None, :])) * np.asarray(func(s))[None, :]
            return vals * dpath(t)[None, :]

        return composite_gauss(integrand, a, b, n)

    pi = math.pi
    lower = leg(lambda u: legs - u - 1j * pi, lambda u: -np.ones_like(u), 0.0, legs, panels)
    vertical = leg(lambda th: 1j * th, lambda th: 1j * np.ones_like(th), -pi, pi, max(4, panels // 4))
    upper = leg(lambda u: u + 1j * pi, lambda u: np.ones_like(u), 0.0, legs, panels)
    val = lower[0] + vertical[0] + upper[0]
    est = lower[1] + vertical[1] + upper[1]
    return val, est


def generalized_fourier(
    kernel: GeneratingKernel,
    phi,
    q_grid: Grid1D,
    window: tuple[float, float] | None = None,
    contour: str = "real",
    normalization: complex | None = None,
    panels: int = 64,
    taper: float = 0.1,
    tol: float = 1e-8,
    reference: Callable | None = None,
) -> tuple[GridWavefunction, TransformReport]:
    """Psi(q) = N int dQ e^{i F1(q, Q)} Phi(Q).

    ``phi`` is a callable (vectorized, complex arguments allowed for the loop
    contour) or a 1D :class:`GridWavefunction`, integrated by the trapezoid
    rule on its own samples.  With
    ``contour='real'`` the integral runs over ``window`` with a cosine taper;
    ``contour='loop'`` (sinh kernel only) uses the loop contour, where
    ``window`` gives the extent of the horizontal legs.  When ``reference`` is
    given, the output is fitted as c * reference(q) and c is reported.
    """
    func, lo, hi = _as_callable(phi, window)
    q = q_grid.points
    N = _default_normalization(kernel) if normalization is None else normalization
    if contour == "real":
        val, est = _window_transform(kernel, func, q, lo, hi, panels, taper, 1, False, False)
        lo2, hi2 = _grown(lo, hi, phi)
        val2, _ = _window_transform(kernel, func, q, lo2, hi2, 2 * panels, taper, 1, False, False)
    elif contour == "loop":
        if kernel.name != "taub_sinh":
            raise InvalidArgumentError("the loop contour is defined for the sinh kernel only")
        if not callable(phi):
            raise InvalidArgumentError("the loop contour needs phi as an analytic callable")
        legs = hi
        val, est = _hankel_transform(kernel, func, q, legs, panels)
        val2, _ = _hankel_transform(kernel, func, q, 2 * legs, 2 * panels)
        lo, hi = 0.0, legs
    else:
        raise InvalidArgumentError(f"unknown contour {contour!r}; expected 'real' or 'loop'")
    return _finish(kernel, N, val, est, val2, q_grid, (lo, hi), contour, tol, reference)


def inverse_generalized_fourier(
    kernel: GeneratingKernel,
    psi,
    Q_grid: Grid1D,
    window: tuple[float, float] | None = None,
    normalization: complex | None = None,
    panels: int = 64,
    taper: float = 0.1,
    tol: float = 1e-8,
    reference: Callable | None = None,
) -> tuple[GridWavefunction, TransformReport]:
    """Phi(Q) = N int dq |d^2F1/dqdQ| e^{-i F1(q, Q)} Psi(q), over a tapered real window."""
    func, lo, hi = _as_callable(psi, window)
    Q = Q_grid.points
    N = _default_normalization(kernel) if normalization is None else normalization
    val, est = _window_transform(kernel, func, Q, lo, hi, panels, taper, -1, True, True)
    lo2, hi2 = _grown(lo, hi, psi)
    val2, _ = _window_transform(kernel, func, Q, lo2, hi2, 2 * panels, taper, -1, True, True)
    return _finish(kernel, N, val, est, val2, Q_grid, (lo, hi), "real", tol, reference)


def _as_callable(phi, window):
    """(source, lo, hi): the source is the callable itself or the sampled wavefunction."""
    if isinstance(phi, GridWavefunction):
        if len(phi.grids) != 1:
            raise InvalidArgumentError("transforms act on one-dimensional wavefunctions")
        lo, hi = window if window is not None else (phi.grid.lo, phi.grid.hi)
        return phi, float(lo), float(hi)
    if not callable(phi):
        raise InvalidArgumentError("phi must be a callable or a GridWavefunction")
    if window is None:
        raise InvalidArgumentError("a window is required for callable inputs")
    return phi, float(window[0]), float(window[1])


def _grown(lo, hi, phi):
    """Window for the sensitivity estimate: doubled about its centre.

    Sampled data cannot be extended, so there the window is halved instead.
    """
    c, half = 0.5 * (lo + hi), (hi - lo)
    if isinstance(phi, GridWavefunction):
        return c - 0.25 * half, c + 0.25 * half
    return c - half, c + half


def _finish(kernel, N, val, est, val2, grid, window, contour, tol, reference):
    out = N * val
    scale = max(float(np.max(np.abs(out))), 1e-300)
    q_est = float(np.max(np.abs(N) * est))
    if q_est > tol * max(1.0, scale):
        raise QuadratureError(f"quadrature estimate {q_est:.3g} exceeds tolerance {tol:g}", estimate=q_est)
    sens = float(np.max(np.abs(N * val2 - out)) / scale) if scale > 1e-300 else 0.0
    fitted = fit_err = None
    if reference is not None:
        ref = np.asarray(reference(grid.points), complex)
        fitted = complex(np.vdot(ref, out) / np.vdot(ref, ref))
        fit_err = float(np.linalg.norm(out - fitted * ref) / max(np.linalg.norm(out), 1e-300))
    wf = GridWavefunction((grid,), out)
    return wf, TransformReport(kernel.name, tuple(window), contour, q_est, sens, complex(N), fitted, fit_err)
