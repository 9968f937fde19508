r"""Bessel functions of pure imaginary order on the positive real axis.

The mode solutions of every Wheeler-DeWitt equation handled by the package are
built from :math:`J_{i\omega}, N_{i\omega}, I_{i\omega}, K_{i\omega}`.  They are
evaluated as follows.

* :math:`I_{i\omega}(x)` -- ascending power series, with :math:`1/\Gamma(1+i\omega)`
  from a Lanczos approximation.  The series terms rotate in phase but do not
  cancel catastrophically for :math:`x \le 60`.
* :math:`K_{i\omega}(x)` -- trapezoidal rule on the shifted contour
  :math:`t + i\beta` of :math:`\tfrac12\int e^{-x\cosh w + i\omega w}\,dw`.  With
  :math:`\beta = \arcsin(\omega/x)` the contour passes through the saddle point,
  so the integrand never exceeds the size of the result; for
  :math:`\omega > x` it runs just below the two saddles on
  :math:`\operatorname{Im} w = \pi/2`.  The integrand is entire and decays
  doubly exponentially, so the trapezoidal rule converges geometrically.
* :math:`H^{(1)}_{i\omega}(x)` -- the same idea on a bent contour
  :math:`t + i\tfrac{\pi}{2}\tanh(t - t_0)` through the real saddle
  :math:`\sinh t_0 = \omega/x`.  Then
  :math:`H^{(2)}_{i\omega} = e^{-\pi\omega}\,\overline{H^{(1)}_{i\omega}}`,
  :math:`J = (H^{(1)} + H^{(2)})/2` and :math:`N = (H^{(1)} - H^{(2)})/2i`.

Error estimates compare the trapezoidal sum at step ``h`` and ``2h`` and add a
rounding term; for the series they are rounding plus the Gamma-function error.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass

import numpy as np

from .errors import DomainError, UnsupportedRangeError

OMEGA_MAX = 50.0
_EPS = np.finfo(float).eps

_LANCZOS_G = 607.0 / 128.0
_LANCZOS_C = (
    0.99999999999999709182,
    57.156235665862923517,
    -59.597960355475491248,
    14.136097974741747174,
    -0.49191381609762019978,
    0.33994649984811888699e-4,
    0.46523628927048575665e-4,
    -0.98374475304879564677e-4,
    0.15808870322491248884e-3,
    -0.21026444172410488319e-3,
    0.21743961811521264320e-3,
    -0.16431810653676389022e-3,
    0.84418223983852743293e-4,
    -0.26190838401581408670e-4,
    0.36899182659531622704e-5,
)


@dataclass(frozen=True)
class ImagOrderResult:
    value: complex | float
    est_error: float


def log_gamma(z: complex) -> complex:
    """log Gamma(z) for complex z (principal branch of the Lanczos form)."""
    z = complex(z)
    if z.real < 0.5:
        # reflection: Gamma(z) Gamma(1-z) = pi / sin(pi z)
        return cmath.log(math.pi) - cmath.log(cmath.sin(math.pi * z)) - log_gamma(1.0 - z)
    z -= 1.0
    a = _LANCZOS_C[0]
    for k in range(1, len(_LANCZOS_C)):
        a += _LANCZOS_C[k] / (z + k)
    t = z + _LANCZOS_G + 0.5
    return 0.5 * math.log(2.0 * math.pi) + (z + 0.5) * cmath.log(t) - t + cmath.log(a)


def gamma(z: complex) -> complex:
    return cmath.exp(log_gamma(z))


def _check(omega, x):
    if not math.isfinite(omega) or abs(omega) > OMEGA_MAX:
        raise UnsupportedRangeError(f"|omega| = {abs(omega)} outside supported range [0, {OMEGA_MAX}]")
    x = np.asarray(x, dtype=float)
    if np.any(~np.isfinite(x)) or np.any(x <= 0):
        raise DomainError("argument must be finite and > 0")
    return x


# -- scalar kernels --------------------------------------------------------------


def _i_series(omega: float, x: float, derivative: bool):
    nu = 1j * omega
    q = 0.25 * x * x
    c = cmath.exp(-log_gamma(1.0 + nu))
    total = c * (nu / x if derivative else 1.0)
    absum = abs(total)
    term = c
    k = 0
    while True:
        k += 1
        term = term * q / (k * (k + nu))
        contrib = term * ((2 * k + nu) / x if derivative else 1.0)
        total += contrib
        absum += abs(contrib)
        if k > q and abs(contrib) <= 1e-17 * abs(total):
            break
    scale = cmath.exp(nu * math.log(0.5 * x))
    value = total * scale
    err = (8.0 * k * _EPS) * absum + 5e-15 * (1.0 + abs(omega)) * abs(value)
    return value, err


def _trapezoid(f: np.ndarray, h: float):
    full = h * f.sum()
    half = 2.0 * h * f[::2].sum()
    err = abs(full - half) + 16.0 * _EPS * h * np.abs(f).sum()
    return full, err


def _k_contour(omega: float, x: float, derivative: bool):
    omega = abs(omega)
    delta = 0.1
    beta = min(math.asin(omega / x), 0.5 * math.pi - delta) if omega <= x else 0.5 * math.pi - delta
    cb = math.cos(beta)
    span = math.acosh(max(1.0, (45.0 + x * cb) / (x * cb))) + 1.0
    h = min(min(0.5 * math.pi - beta, 0.5) / 10.0, 0.25 / (1.0 + omega))
    n = int(math.ceil(span / h))
    t = np.arange(-n, n + 1) * h
    w = t + 1j * beta
    f = np.exp(-x * np.cosh(w) + 1j * omega * w)
    if derivative:
        f = -np.cosh(w) * f
    s, err = _trapezoid(f, h)
    return 0.5 * s.real, 0.5 * err


def _h1_contour(omega: float, x: float, derivative: bool):
    """Hankel function H^(1)_{i omega}(x) for omega >= 0."""
    t0 = math.asinh(omega / x)
    tmax = max(t0 + 5.0, math.log(2.0 * (0.5 * math.pi * omega + 45.0) / x) + 1.0)
    tmin = -(math.log(90.0 / x) + 1.0)
    h = min(0.02, 0.3 / (1.0 + omega))
    t = tmin + h * np.arange(int(math.ceil((tmax - tmin) / h)) + 1)
    bend = 0.5 * math.pi * np.tanh(t - t0)
    dbend = 0.5 * math.pi / np.cosh(t - t0) ** 2
    w = t + 1j * bend
    f = np.exp(1j * x * np.cosh(w) - 1j * omega * w) * (1.0 + 1j * dbend)
    if derivative:
        f = 1j * np.cosh(w) * f
    s, err = _trapezoid(f, h)
    pref = math.exp(0.5 * math.pi * omega) / (math.pi * 1j)
    return pref * s, abs(pref) * err


def _hankel_pair(omega: float, x: float, derivative: bool):
    w = abs(omega)
    h1, e1 = _h1_contour(w, x, derivative)
    damp = math.exp(-math.pi * w)
    h2 = damp * h1.conjugate()
    return h1, h2, e1


def _j_scalar(omega, x, derivative):
    h1, h2, e = _hankel_pair(omega, x, derivative)
    v = 0.5 * (h1 + h2)
    return (v.conjugate() if omega < 0 else v), e


def _n_scalar(omega, x, derivative):
    h1, h2, e = _hankel_pair(omega, x, derivative)
    v = (h1 - h2) / 2j
    return (v.conjugate() if omega < 0 else v), e


_KERNELS = {
    "I": (_i_series, complex),
    "K": (_k_contour, float),
    "J": (_j_scalar, complex),
    "N": (_n_scalar, complex),
}


def evaluate(family: str, omega: float, x: float, derivative: bool = False) -> ImagOrderResult:
    """Value (or x-derivative) of one family at a single point, with an error estimate."""
    try:
        kernel, kind = _KERNELS[family]
    except KeyError:
        raise DomainError(f"unknown Bessel family {family!r}; expected one of I, K, J, N") from None
    x = float(_check(omega, x))
    value, err = kernel(float(omega), x, derivative)
    return ImagOrderResult(kind(value), float(err))


def _vectorized(family: str, omega: float, x, derivative: bool):
    kernel, kind = _KERNELS[family]
    xa = _check(omega, x)
    flat = xa.ravel()
    out = np.empty(flat.shape, dtype=kind)
    for i, xi in enumerate(flat):
        out[i] = kernel(float(omega), float(xi), derivative)[0]
    if xa.ndim == 0:
        return kind(out[0])
    return out.reshape(xa.shape)


def mod_bessel_K_imag(omega: float, x, derivative: bool = False):
    """K_{i omega}(x), real-valued; ``derivative=True`` gives d/dx."""
    return _vectorized("K", omega, x, derivative)


def mod_bessel_I_imag(omega: float, x, derivative: bool = False):
    """I_{i omega}(x), complex; any sign of omega."""
    return _vectorized("I", omega, x, derivative)


def bessel_J_imag(omega: float, x, derivative: bool = False):
    return _vectorized("J", omega, x, derivative)


def bessel_N_imag(omega: float, x, derivative: bool = False):
    """Neumann (second-kind) function N_{i omega}(x) = Y_{i omega}(x)."""
    return _vectorized("N", omega, x, derivative)


def envelope(values: np.ndarray, derivatives: np.ndarray, omega: float, x: np.ndarray) -> np.ndarray:
    """Local magnitude sqrt(|f|^2 + |x f'|^2 / (omega^2 + x^2)).

    Used as the denominator of relative errors for oscillating functions, whose
    pointwise relative error is meaningless near zeros.
    """
    x = np.asarray(x, float)
    return np.sqrt(np.abs(values) ** 2 + np.abs(x * derivatives) ** 2 / (omega * omega + x * x))


def bessel_table(omegas, xs):
    """Rows (omega, x, family, Re, Im, est_error) for the audit CSV dump."""
    rows = []
    for w in omegas:
        for x in xs:
            for fam in ("I", "K", "J", "N"):
                r = evaluate(fam, w, x)
                v = complex(r.value)
                rows.append((float(w), float(x), fam, v.real, v.imag, r.est_error))
    return rows
