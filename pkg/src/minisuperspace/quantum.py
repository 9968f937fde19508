"""Reduced Schrödinger theory on one sheet of the factorized constraint.

On a two-dimensional model with clock coordinate q0 and space coordinate q1,
each sheet carries

    h^2(q0) = -d^2/dq1^2 + V_eff(q0, q1),   h = sqrt(h^2) (spectral),

and the kernels of K+ = p0 + h and K- = p0 - h (p0 = -i d/dq0) are the
solutions of i d/dq0 psi = h psi and -i d/dq0 psi = h psi respectively.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from .canonical import SheetHamiltonian
from .errors import InvalidArgumentError, NonPositiveSpectrumError
from .grids import (
    DiscretizedOperator,
    Grid1D,
    GridWavefunction,
    first_derivative,
    second_derivative,
    stencil_halfwidth,
)
from .modes import ModeSpectrum

NEGATIVE_EIGEN_TOL = 1e-10


def spectral_sqrt(h2: np.ndarray, tol: float = NEGATIVE_EIGEN_TOL):
    """(h, eigenvalues E >= 0, eigenvectors) of a Hermitian non-negative matrix."""
    lam, U = np.linalg.eigh(h2)
    if lam[0] < -tol:
        raise NonPositiveSpectrumError(f"h^2 has eigenvalue {lam[0]:.3g} < 0", eigenvalue=float(lam[0]))
    E = np.sqrt(np.clip(lam, 0.0, None))
    return (U * E) @ U.conj().T, E, U


@dataclass
class QuantumSheet:
    """Discretized h(t) on the space grid for one sheet.

    ``h2_of_t(t)`` returns the Hermitian matrix h^2 at clock value t; ``branch``
    is +1 for K+ (i d/dt psi = h psi) and -1 for K-.  Time independence is
    declared, not detected.
    """

    grid: Grid1D
    h2_of_t: Callable[[float], np.ndarray]
    branch: int = 1
    time_dependent: bool = False
    boundary: str = "dirichlet_zero"
    h2_derivative: Callable[[float], np.ndarray] | None = None
    label: str = ""
    _cache: dict = field(default_factory=dict, repr=False)

    def __post_init__(self):
        if self.branch not in (1, -1):
            raise InvalidArgumentError("branch must be +1 or -1")

    @classmethod
    def from_sheet(
        cls, sheet: SheetHamiltonian, grid: Grid1D, boundary: str = "dirichlet_zero", order: int = 4
    ) -> "QuantumSheet":
        model = sheet.model
        if model.dimension != 2:
            raise InvalidArgumentError("quantum sheets are built for two-dimensional models")
        c = sheet.clock_axis
        m = 1 - c
        kinetic = -second_derivative(grid, order, boundary)
        x = grid.points
        sigma = sheet.sigma
        terms = [(-sigma * t.coefficient, t.exponents[c], t.exponents[m]) for t in model.potential]

        def h2(t):
            V = np.zeros_like(x)
            for coef, ec, em in terms:
                V += coef * np.exp(ec * t + em * x)
            return kinetic + np.diag(V)

        def dh2(t):
            dV = np.zeros_like(x)
            for coef, ec, em in terms:
                dV += coef * ec * np.exp(ec * t + em * x)
            return np.diag(dV)

        return cls(grid, h2, sheet.branch, sheet.time_dependent, boundary, dh2, sheet.label)

    @classmethod
    def from_family(cls, grid: Grid1D, h_of_t: Callable[[float], np.ndarray], branch: int = 1, time_dependent=True):
        """A sheet defined directly by h(t) (its square is used for h^2)."""
        sheet = cls(grid, lambda t: h_of_t(t) @ h_of_t(t), branch, time_dependent)
        sheet._direct_h = h_of_t
        return sheet

    def opposite(self) -> "QuantumSheet":
        """The other sheet built on the same h (shares the spectral cache)."""
        other = QuantumSheet(
            self.grid, self.h2_of_t, -self.branch, self.time_dependent, self.boundary,
            self.h2_derivative, self.label, self._cache,
        )
        if hasattr(self, "_direct_h"):
            other._direct_h = self._direct_h
        return other

    def decomposition(self, t: float = 0.0):
        key = 0.0 if not self.time_dependent else float(t)
        if key not in self._cache:
            direct = getattr(self, "_direct_h", None)
            if direct is not None:
                lam, U = np.linalg.eigh(direct(key))
                self._cache[key] = ((U * lam) @ U.conj().T, lam, U)
            else:
                self._cache[key] = spectral_sqrt(self.h2_of_t(key))
        return self._cache[key]

    def h_matrix(self, t: float = 0.0) -> np.ndarray:
        return self.decomposition(t)[0]

    def h_operator(self, t: float = 0.0) -> DiscretizedOperator:
        return DiscretizedOperator(self.h_matrix(t), self.grid, self.boundary, hermitian=True, name="h")

    def h_dot(self, t: float) -> np.ndarray:
        """dh/dt from dh^2/dt through the divided-difference (Daleckii-Krein) formula."""
        if not self.time_dependent:
            return np.zeros((self.grid.n, self.grid.n))
        if self.h2_derivative is None:
            raise InvalidArgumentError("sheet has no analytic dh^2/dt")
        _, E, U = self.decomposition(t)
        denom = E[:, None] + E[None, :]
        G = np.where(denom > 0, 1.0 / np.where(denom > 0, denom, 1.0), 0.0)
        D = U.conj().T @ self.h2_derivative(t) @ U
        return U @ (G * D) @ U.conj().T


# -- reduced spectrum ---------------------------------------------------------------


@dataclass(frozen=True)
class ReducedSpectrum:
    energies: np.ndarray
    eigenfunctions: np.ndarray
    grid: Grid1D
    spectrum: ModeSpectrum

    def eigenfunction(self, k: int) -> GridWavefunction:
        return GridWavefunction((self.grid,), self.eigenfunctions[k])


def reduced_spectrum(sheet: QuantumSheet, n_modes: int, lowest: bool = True) -> ReducedSpectrum:
    """Eigenpairs (E, phi_E) of the discretized h^2, normalized on the grid."""
    if sheet.time_dependent:
        raise InvalidArgumentError("reduced_spectrum needs a time-independent sheet")
    if not 1 <= n_modes <= sheet.grid.n:
        raise InvalidArgumentError(f"n_modes must lie in [1, {sheet.grid.n}]")
    _, E, U = sheet.decomposition(0.0)
    idx = np.arange(n_modes) if lowest else np.arange(sheet.grid.n - n_modes, sheet.grid.n)
    vecs = (U[:, idx] / math.sqrt(sheet.grid.spacing)).T
    # fix the global phase: largest component real positive
    for k in range(len(idx)):
        j = int(np.argmax(np.abs(vecs[k])))
        vecs[k] *= np.conj(vecs[k, j]) / abs(vecs[k, j])
    spec = ModeSpectrum(E[idx], {"c": np.ones(len(idx))})
    return ReducedSpectrum(E[idx].copy(), vecs, sheet.grid, spec)


# -- Schrödinger evolution --------------------------------------------------------


NORM_TOL = 1e-8


def _magnus_generator(sheet: QuantumSheet, t: float, dt: float) -> np.ndarray:
    """Fourth-order Magnus generator G with psi(t+dt) = exp(-i G) psi(t)."""
    c = math.sqrt(3.0) / 6.0
    h1 = sheet.branch * sheet.h_matrix(t + (0.5 - c) * dt)
    h2 = sheet.branch * sheet.h_matrix(t + (0.5 + c) * dt)
    comm = h2 @ h1 - h1 @ h2
    G = 0.5 * dt * (h1 + h2) - 1j * (math.sqrt(3.0) / 12.0) * dt * dt * comm
    return 0.5 * (G + G.conj().T)


def _expm_hermitian(G: np.ndarray) -> np.ndarray:
    lam, U = np.linalg.eigh(G)
    return (U * np.exp(-1j * lam)) @ U.conj().T


def propagator(sheet: QuantumSheet, t0: float, t1: float, max_step: float = 1e-2) -> np.ndarray:
    """U(t1, t0) on the sheet; spectral for constant h, ordered Magnus product otherwise."""
    if not sheet.time_dependent:
        _, E, U = sheet.decomposition(0.0)
        return (U * np.exp(-1j * sheet.branch * E * (t1 - t0))) @ U.conj().T
    n = max(1, int(math.ceil(abs(t1 - t0) / max_step)))
    dt = (t1 - t0) / n
    P = np.eye(sheet.grid.n, dtype=complex)
    for k in range(n):
        P = _expm_hermitian(_magnus_generator(sheet, t0 + k * dt, dt)) @ P
    return P


def schrodinger_evolve(
    sheet: QuantumSheet, psi0: GridWavefunction, t_grid: Sequence[float], max_step: float = 1e-2
) -> list[GridWavefunction]:
    """States at every clock value in ``t_grid`` (the first entry is the initial time)."""
    if len(psi0.grids) != 1 or psi0.grid.n != sheet.grid.n:
        raise InvalidArgumentError("initial state must live on the sheet's space grid")
    if abs(psi0.norm() - 1.0) > NORM_TOL:
        raise InvalidArgumentError(f"initial state must be normalized (norm = {psi0.norm():.12g})")
    ts = [float(t) for t in t_grid]
    if not ts:
        raise InvalidArgumentError("t_grid is empty")
    out = [GridWavefunction(psi0.grids, psi0.values, None, ts[0])]
    v = psi0.values
    for a, b in zip(ts[:-1], ts[1:]):
        v = propagator(sheet, a, b, max_step) @ v
        out.append(GridWavefunction(psi0.grids, v, None, b))
    return out


def norm_drift(states: Sequence[GridWavefunction]) -> float:
    """max |norm - 1| divided by the elapsed clock interval (at least 1)."""
    span = max(1.0, abs(states[-1].time - states[0].time))
    return max(abs(s.norm() - 1.0) for s in states) / span


def propagation_residual(sheet: QuantumSheet, states: Sequence[GridWavefunction], max_step: float = 1e-2) -> float:
    """max_k || psi(t_k) - U(t_k, t_0) psi(t_0) || for a sequence of slices."""
    v0, t0 = states[0].values, states[0].time
    worst = 0.0
    for s in states[1:]:
        diff = s.values - propagator(sheet, t0, s.time, max_step) @ v0
        worst = max(worst, float(np.sqrt(np.sum(np.abs(diff) ** 2) * s.grid.spacing)))
    return worst


# -- products of the sheet operators -------------------------------------------------


@dataclass(frozen=True)
class SheetProductReport:
    r_pm: float
    r_mp: float
    commutator_norm: float
    symmetrized_residual: float
    psi_norm: float

    @property
    def symmetrized_holds(self) -> bool:
        return self.symmetrized_residual < 1e-8 * max(1.0, self.psi_norm)

    def to_dict(self) -> dict:
        return {
            "r_pm": self.r_pm,
            "r_mp": self.r_mp,
            "commutator_norm": self.commutator_norm,
            "symmetrized_residual": self.symmetrized_residual,
            "symmetrized_holds": self.symmetrized_holds,
        }


def sheet_product_residual(
    sheets: tuple[QuantumSheet, QuantumSheet], psi: GridWavefunction, order: int = 4
) -> SheetProductReport:
    """Compare K+K-, K-K+ and their mean with H = p0^2 - h^2 on a 2D wavefunction.

    ``psi`` is sampled on (clock grid, space grid) with ``clock_axis = 0``.
    p0 = -i D_t uses the same first-difference matrix everywhere, so the mean
    of the two products equals H in exact arithmetic; K+K- - H = -[p0, h].
    The commutator norm is computed independently as ||dh/dt psi|| from the
    analytic derivative of h^2.  Norms are taken over interior clock slices.
    """
    plus, minus = sheets
    if plus.grid != minus.grid:
        raise InvalidArgumentError("the two sheets must share the space grid")
    if len(psi.grids) != 2 or psi.clock_axis not in (0, None) or psi.grids[1] != plus.grid:
        raise InvalidArgumentError("psi must be sampled on (clock grid, sheet space grid)")
    tgrid = psi.grids[0]
    t = tgrid.points
    Dt = first_derivative(tgrid, order)
    v = psi.values

    def p0(w):
        return -1j * (Dt @ w)

    H = [plus.h_matrix(tk) for tk in t]

    def h(w):
        return np.stack([H[k] @ w[k] for k in range(len(t))])

    Kp = lambda w: p0(w) + h(w)
    Km = lambda w: p0(w) - h(w)
    Hv = p0(p0(v)) - h(h(v))
    pm = Kp(Km(v)) - Hv
    mp = Km(Kp(v)) - Hv
    sym = 0.5 * (Kp(Km(v)) + Km(Kp(v))) - Hv
    comm = np.stack([plus.h_dot(tk) @ v[k] for k, tk in enumerate(t)])
    # [p0, h] psi = -i (dh/dt) psi in the continuum
    hw = 2 * stencil_halfwidth(order)
    inner = slice(hw, len(t) - hw)
    vol = tgrid.spacing * plus.grid.spacing

    def nrm(a):
        return float(np.sqrt(np.sum(np.abs(a[inner]) ** 2) * vol))

    return SheetProductReport(nrm(pm), nrm(mp), nrm(comm), nrm(sym), nrm(v))


# -- operator ordering ---------------------------------------------------------------


@dataclass(frozen=True)
class OrderingReport:
    max_deviation: float
    first_order_coefficient: float
    zeroth_order_coefficient: float
    expected_first: float
    expected_zeroth: float
    fit_residual: float

    def to_dict(self) -> dict:
        return dict(self.__dict__)


def gaussian_bump(center: float, width: float):
    """(f, f') callables for a Gaussian test function."""
    f = lambda q: np.exp(-0.5 * ((q - center) / width) ** 2)
    df = lambda q: -(q - center) / width**2 * f(q)
    return f, df


def ordering_check(A: float, C: float, b: float, grid: Grid1D, test_fns: Sequence, order: int = 6) -> OrderingReport:
    """Deviation of -e^{Aq} p e^{(b-A-C)q} p e^{Cq} from e^{bq}(-p^2) on test functions.

    With p = -i d/dq both operators use the same first-difference matrix D,
    so the trivial ordering is e^{bq} D D.  The analytic difference is
    e^{bq} [(b - A + C) f' + C (b - A) f]; the measured deviation is fitted
    against the profiles e^{bq} f' and e^{bq} f.  ``test_fns`` holds (f, f')
    pairs of callables.
    """
    q = grid.points
    D = first_derivative(grid, order)
    eA, eM, eC, eB = (np.exp(k * q) for k in (A, b - A - C, C, b))
    general = (eA[:, None] * D) @ (eM[:, None] * D) @ np.diag(eC)
    trivial = eB[:, None] * (D @ D)
    diff_op = general - trivial
    worst = 0.0
    rows, rhs = [], []
    hw = 2 * stencil_halfwidth(order)
    inner = slice(hw, len(q) - hw)
    for f, df in test_fns:
        fv = f(q)
        dev = diff_op @ fv
        worst = max(worst, float(np.linalg.norm(dev[inner]) / np.linalg.norm(fv)))
        rows.append(np.column_stack([(eB * df(q))[inner], (eB * fv)[inner]]))
        rhs.append(dev[inner])
    M = np.vstack(rows)
    y = np.concatenate(rhs)
    coef, *_ = np.linalg.lstsq(M, y, rcond=None)
    fit_res = float(np.linalg.norm(M @ coef - y) / max(np.linalg.norm(y), 1e-300))
    return OrderingReport(worst, float(coef[0]), float(coef[1]), b - A + C, C * (b - A), fit_res)
