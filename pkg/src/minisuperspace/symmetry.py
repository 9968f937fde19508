"""Motion reversal, clock reversal and the split of real solutions into C + C*."""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path
from typing import Mapping, Sequence

import numpy as np

from .errors import InvalidArgumentError, NotASolutionError
from .grids import Grid1D, GridWavefunction
from .modes import ModeSpectrum, exp_mode_factor, wdw_residual
from .model import taub_model
from .quantum import QuantumSheet, propagator

PLUS_SHEET_ORIENTATION = 1


@dataclass(frozen=True)
class SheetLabel:
    """Sheet sign (+1 for K+, -1 for K-) and the clock orientation t = orientation * q0.

    ``plus_orientation`` fixes the convention: K+ carries t = plus_orientation * q0
    and K- the opposite.
    """

    sign: int
    clock: str = "q0"
    plus_orientation: int = PLUS_SHEET_ORIENTATION

    def __post_init__(self):
        if self.sign not in (1, -1) or self.plus_orientation not in (1, -1):
            raise InvalidArgumentError("sheet sign and orientation must be +1 or -1")

    @property
    def orientation(self) -> int:
        return self.sign * self.plus_orientation

    @property
    def name(self) -> str:
        return "K+" if self.sign > 0 else "K-"

    def opposite(self) -> "SheetLabel":
        return SheetLabel(-self.sign, self.clock, self.plus_orientation)

    def describe(self) -> str:
        return f"{self.name}: t = {'+' if self.orientation > 0 else '-'}{self.clock}"


def _clock_values(psi: GridWavefunction) -> tuple[int, Grid1D]:
    if len(psi.grids) != 2 or psi.clock_axis is None:
        raise InvalidArgumentError("the wavefunction needs two grids and a clock axis")
    return psi.clock_axis, psi.grids[psi.clock_axis]


def motion_reversal(psi: GridWavefunction) -> GridWavefunction:
    """Psi(q, q0) -> conj(Psi(q, -q0)); the clock grid must be symmetric about zero."""
    axis, g = _clock_values(psi)
    t = g.points
    if not np.allclose(t, -t[::-1], rtol=0, atol=1e-12 * max(1.0, abs(g.hi))):
        raise InvalidArgumentError(f"clock grid [{g.lo}, {g.hi}] is not symmetric about 0")
    return GridWavefunction(psi.grids, np.conj(np.flip(psi.values, axis=axis)), axis, psi.time, dict(psi.meta))


def clock_reversal(psi: GridWavefunction, from_sheet: SheetLabel) -> tuple[GridWavefunction, SheetLabel]:
    """Psi -> conj(Psi), moving the state to the other sheet."""
    return (
        GridWavefunction(psi.grids, np.conj(psi.values), psi.clock_axis, psi.time, dict(psi.meta)),
        from_sheet.opposite(),
    )


def sheet_residual(sheet: QuantumSheet, psi: GridWavefunction, max_step: float = 1e-2) -> float:
    """max_k || psi(t_k) - U(t_k, t_0) psi(t_0) || over the clock slices of a 2D wavefunction.

    Measures how far ``psi`` is from a solution of the sheet's Schrödinger
    equation (zero up to rounding for an exact propagated solution).
    """
    axis, g = _clock_values(psi)
    vals = np.moveaxis(psi.values, axis, 0)
    space = psi.grids[1 - axis]
    t = g.points
    worst = 0.0
    for k in range(1, len(t)):
        diff = vals[k] - propagator(sheet, t[0], t[k], max_step) @ vals[0]
        worst = max(worst, float(np.sqrt(np.sum(np.abs(diff) ** 2) * space.spacing)))
    return worst


def evolve_to_grid(sheet: QuantumSheet, psi0: np.ndarray, clock: Grid1D, start: float = 0.0, max_step: float = 1e-2):
    """2D wavefunction (clock x space) obtained by propagating ``psi0`` from ``start``."""
    rows = [propagator(sheet, start, t, max_step) @ psi0 for t in clock.points]
    return GridWavefunction((clock, sheet.grid), np.array(rows), 0)


# -- C + C* decomposition -----------------------------------------------------------


@dataclass(frozen=True)
class CStarDecomposition:
    c_part: GridWavefunction
    cstar_part: GridWavefunction
    c_coefficients: np.ndarray
    cstar_coefficients: np.ndarray
    reconstruction_error: float
    wdw_relative_residual: float

    def to_dict(self) -> dict:
        return {
            "c_norm": self.c_part.norm(),
            "cstar_norm": self.cstar_part.norm(),
            "reconstruction_error": self.reconstruction_error,
            "wdw_relative_residual": self.wdw_relative_residual,
            "c_coefficients": [[float(c.real), float(c.imag)] for c in self.c_coefficients],
            "cstar_coefficients": [[float(c.real), float(c.imag)] for c in self.cstar_coefficients],
        }

    def write_json(self, path: str | Path) -> Path:
        path = Path(path)
        path.write_text(json.dumps(self.to_dict(), indent=2, sort_keys=True) + "\n")
        return path


def decompose_c_cstar(
    solution: GridWavefunction,
    basis: ModeSpectrum | Sequence[float],
    params: Mapping[str, float],
    residual_threshold: float = 5e-2,
) -> CStarDecomposition:
    """Split a Taub-model solution on the (Omega, phi) grid into I_{+iw} and I_{-iw} parts.

    The basis functions are I_{+-i w_k}(|lambda| e^{-phi}) times the decaying
    Omega factor of the same frequency.  For real input the two parts are
    complex conjugates of each other.
    """
    omegas = basis.omegas if isinstance(basis, ModeSpectrum) else np.asarray(basis, float)
    cbar, lam = float(params["cbar"]), float(params["lam"])
    if cbar >= 0:
        raise InvalidArgumentError("the decaying Omega factor needs cbar < 0")
    rel = wdw_residual(solution, taub_model(cbar, lam)).relative
    if rel > residual_threshold:
        raise NotASolutionError(
            f"relative Wheeler-DeWitt residual {rel:.3g} exceeds {residual_threshold:g}", residual=rel
        )
    g_om, g_phi = solution.grids
    cols_c, cols_s = [], []
    for w in omegas:
        F = exp_mode_factor("K", 2.0 * cbar, 6.0, w, g_om.points).astype(complex)
        Ip = exp_mode_factor("I", -lam * lam, -2.0, w, g_phi.points)
        Im = exp_mode_factor("I", -lam * lam, -2.0, -w, g_phi.points)
        cols_c.append(np.outer(F, Ip).ravel())
        cols_s.append(np.outer(F, Im).ravel())
    k = len(omegas)
    B = np.column_stack(cols_c + cols_s)
    f = solution.values.ravel()
    coef, *_ = np.linalg.lstsq(B, f, rcond=None)
    shape = solution.values.shape
    c_vals = (B[:, :k] @ coef[:k]).reshape(shape)
    s_vals = (B[:, k:] @ coef[k:]).reshape(shape)
    err = float(np.linalg.norm(c_vals + s_vals - solution.values) / np.linalg.norm(solution.values))
    mk = lambda v: GridWavefunction(solution.grids, v, solution.clock_axis)
    return CStarDecomposition(mk(c_vals), mk(s_vals), coef[:k], coef[k:], err, rel)
