"""Uniform grids, sampled wavefunctions and finite-difference operators."""

from __future__ import annotations

import csv
from dataclasses import dataclass, field
from pathlib import Path
from typing import Sequence

import numpy as np

from .errors import InvalidArgumentError

BOUNDARIES = ("dirichlet_zero", "periodic")

_FIRST = {
    2: np.array([-1 / 2, 0.0, 1 / 2]),
    4: np.array([1 / 12, -2 / 3, 0.0, 2 / 3, -1 / 12]),
    6: np.array([-1 / 60, 3 / 20, -3 / 4, 0.0, 3 / 4, -3 / 20, 1 / 60]),
    8: np.array([1 / 280, -4 / 105, 1 / 5, -4 / 5, 0.0, 4 / 5, -1 / 5, 4 / 105, -1 / 280]),
}
_SECOND = {
    2: np.array([1.0, -2.0, 1.0]),
    4: np.array([-1 / 12, 4 / 3, -5 / 2, 4 / 3, -1 / 12]),
    6: np.array([1 / 90, -3 / 20, 3 / 2, -49 / 18, 3 / 2, -3 / 20, 1 / 90]),
}


@dataclass(frozen=True)
class Grid1D:
    lo: float
    hi: float
    n: int
    label: str = "q"

    def __post_init__(self):
        object.__setattr__(self, "lo", float(self.lo))
        object.__setattr__(self, "hi", float(self.hi))
        object.__setattr__(self, "n", int(self.n))
        if not self.hi > self.lo:
            raise InvalidArgumentError(f"grid needs hi > lo, got [{self.lo}, {self.hi}]")
        if self.n < 16:
            raise InvalidArgumentError(f"grid needs at least 16 points, got {self.n}")

    @property
    def spacing(self) -> float:
        return (self.hi - self.lo) / (self.n - 1)

    @property
    def points(self) -> np.ndarray:
        return np.linspace(self.lo, self.hi, self.n)

    def refined(self, factor: int = 2) -> "Grid1D":
        """Same interval, spacing divided by ``factor`` (old points are kept)."""
        return Grid1D(self.lo, self.hi, factor * (self.n - 1) + 1, self.label)

    def to_dict(self) -> dict:
        return {"lo": self.lo, "hi": self.hi, "n": self.n, "spacing": self.spacing, "label": self.label}


def stencil_matrix(weights: np.ndarray, n: int, boundary: str = "dirichlet_zero") -> np.ndarray:
    """Banded (or circulant) matrix with the given centred stencil weights."""
    if boundary not in BOUNDARIES:
        raise InvalidArgumentError(f"unknown boundary {boundary!r}; expected one of {BOUNDARIES}")
    half = len(weights) // 2
    M = np.zeros((n, n))
    for k, w in enumerate(weights):
        off = k - half
        if w == 0.0:
            continue
        if boundary == "periodic":
            M += w * np.roll(np.eye(n), off, axis=1)
        else:
            M += w * np.eye(n, k=off)
    return M


def first_derivative(grid: Grid1D, order: int = 4, boundary: str = "dirichlet_zero") -> np.ndarray:
    try:
        w = _FIRST[order]
    except KeyError:
        raise InvalidArgumentError(f"first-derivative order must be one of {sorted(_FIRST)}") from None
    return stencil_matrix(w, grid.n, boundary) / grid.spacing


def second_derivative(grid: Grid1D, order: int = 4, boundary: str = "dirichlet_zero") -> np.ndarray:
    try:
        w = _SECOND[order]
    except KeyError:
        raise InvalidArgumentError(f"second-derivative order must be one of {sorted(_SECOND)}") from None
    return stencil_matrix(w, grid.n, boundary) / grid.spacing**2


def stencil_halfwidth(order: int) -> int:
    return order // 2


@dataclass(frozen=True)
class DiscretizedOperator:
    """A dense matrix acting on values sampled on ``grid``."""

    matrix: np.ndarray
    grid: Grid1D
    boundary: str = "dirichlet_zero"
    hermitian: bool = False
    name: str = ""

    def __post_init__(self):
        M = np.asarray(self.matrix)
        if M.shape != (self.grid.n, self.grid.n):
            raise InvalidArgumentError(f"operator shape {M.shape} does not match grid size {self.grid.n}")
        if self.boundary not in BOUNDARIES:
            raise InvalidArgumentError(f"unknown boundary {self.boundary!r}")
        if self.hermitian:
            defect = np.max(np.abs(M - M.conj().T)) if M.size else 0.0
            if defect > 1e-12 * max(1.0, np.max(np.abs(M))):
                raise InvalidArgumentError(f"operator claimed Hermitian but |M - M^H| = {defect:.3g}")
        object.__setattr__(self, "matrix", M)

    def __call__(self, values: np.ndarray) -> np.ndarray:
        return self.matrix @ values

    def __matmul__(self, other):
        if isinstance(other, DiscretizedOperator):
            return DiscretizedOperator(self.matrix @ other.matrix, self.grid, self.boundary)
        return self.matrix @ other


@dataclass(frozen=True)
class GridWavefunction:
    """Complex samples on a 1D grid or on a product of two grids.

    ``clock_axis`` names the index of the clock grid for 2D data; the inner
    product on a clock slice uses the flat measure of the remaining axis.
    """

    grids: tuple[Grid1D, ...]
    values: np.ndarray
    clock_axis: int | None = None
    time: float | None = None
    meta: dict = field(default_factory=dict, compare=False)

    def __post_init__(self):
        grids = tuple(self.grids) if isinstance(self.grids, (tuple, list)) else (self.grids,)
        if not 1 <= len(grids) <= 2:
            raise InvalidArgumentError("wavefunctions live on one or two grids")
        v = np.asarray(self.values, dtype=complex)
        shape = tuple(g.n for g in grids)
        if v.shape != shape:
            raise InvalidArgumentError(f"values shape {v.shape} does not match grid shape {shape}")
        if not np.all(np.isfinite(v)):
            raise InvalidArgumentError("wavefunction values must be finite")
        if self.clock_axis is not None and not 0 <= self.clock_axis < len(grids):
            raise InvalidArgumentError("clock_axis out of range")
        object.__setattr__(self, "grids", grids)
        object.__setattr__(self, "values", v)

    @property
    def grid(self) -> Grid1D:
        return self.grids[0]

    def cell_volume(self) -> float:
        return float(np.prod([g.spacing for g in self.grids]))

    def norm(self) -> float:
        return float(np.sqrt(np.sum(np.abs(self.values) ** 2) * self.cell_volume()))

    def inner(self, other: "GridWavefunction") -> complex:
        if other.values.shape != self.values.shape:
            raise InvalidArgumentError("inner product needs wavefunctions on the same grid")
        return complex(np.vdot(self.values, other.values) * self.cell_volume())

    def slice(self, index: int) -> "GridWavefunction":
        """The 1D wavefunction on a fixed clock slice."""
        if len(self.grids) != 2 or self.clock_axis is None:
            raise InvalidArgumentError("slicing needs 2D data with a clock axis")
        space = self.grids[1 - self.clock_axis]
        vals = np.take(self.values, index, axis=self.clock_axis)
        t = self.grids[self.clock_axis].points[index]
        return GridWavefunction((space,), vals, None, float(t))

    def normalized(self) -> "GridWavefunction":
        n = self.norm()
        if n == 0:
            raise InvalidArgumentError("cannot normalize the zero wavefunction")
        return GridWavefunction(self.grids, self.values / n, self.clock_axis, self.time, dict(self.meta))

    def write_csv(self, path: str | Path) -> Path:
        path = Path(path)
        with path.open("w", newline="") as fh:
            w = csv.writer(fh, lineterminator="\n")
            labels = [g.label for g in self.grids]
            w.writerow(labels + ["re", "im"])
            if len(self.grids) == 1:
                for x, v in zip(self.grid.points, self.values):
                    w.writerow([repr(float(x)), repr(float(v.real)), repr(float(v.imag))])
            else:
                a, b = self.grids[0].points, self.grids[1].points
                for i, x in enumerate(a):
                    for j, y in enumerate(b):
                        v = self.values[i, j]
                        w.writerow([repr(float(x)), repr(float(y)), repr(float(v.real)), repr(float(v.imag))])
        return path


def sample_function(func, grids: Sequence[Grid1D], clock_axis: int | None = None) -> GridWavefunction:
    """Sample ``func(*coords)`` (vectorized over meshgrid arrays) on the product grid."""
    grids = tuple(grids)
    mesh = np.meshgrid(*[g.points for g in grids], indexing="ij")
    return GridWavefunction(grids, np.asarray(func(*mesh), dtype=complex), clock_axis)
