import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from minisuperspace.errors import InvalidArgumentError, NotASolutionError
from minisuperspace.grids import Grid1D, GridWavefunction, second_derivative
from minisuperspace.modes import exp_mode_factor, mode_on_grid
from minisuperspace.quantum import QuantumSheet
from minisuperspace.symmetry import (
    SheetLabel,
    clock_reversal,
    decompose_c_cstar,
    evolve_to_grid,
    motion_reversal,
    sheet_residual,
)

X = Grid1D(-6, 6, 100, "x")
CLOCK = Grid1D(-1, 1, 17, "t")
TAUB = {"cbar": -0.5, "lam": 1.0}


def packet(center=1.0, k=0.5):
    x = X.points
    return GridWavefunction((X,), np.exp(-((x - center) ** 2) + 1j * k * x)).normalized()


@pytest.fixture(scope="module")
def static_sheet():
    h2 = -second_derivative(X, 4) + np.diag(1.0 + 0.3 * X.points**2)
    return QuantumSheet(X, lambda t: h2)


@pytest.fixture(scope="module")
def moving_sheet():
    x = X.points
    h = lambda t: np.diag(1 + 0.5 * np.sin(3 * t) + 0.1 * x**2) + 0.2 * (np.eye(X.n, k=1) + np.eye(X.n, k=-1))
    return QuantumSheet.from_family(X, h, 1, True)


def test_sheet_labels():
    plus = SheetLabel(1)
    assert plus.orientation == 1 and plus.opposite().orientation == -1
    assert SheetLabel(1, plus_orientation=-1).describe() == "K+: t = -q0"
    assert plus.opposite().opposite() == plus
    with pytest.raises(InvalidArgumentError):
        SheetLabel(0)


def test_motion_reversal_preserves_sheet(static_sheet):
    psi = evolve_to_grid(static_sheet, packet().values, CLOCK)
    rev = motion_reversal(psi)
    assert sheet_residual(static_sheet, rev) < 1e-8
    assert sheet_residual(static_sheet.opposite(), rev) > 1e-2
    assert np.array_equal(motion_reversal(rev).values, psi.values)


def test_clock_reversal_flips_sheet(static_sheet, moving_sheet):
    for sheet, start in ((static_sheet, 0.0), (moving_sheet, -1.0)):
        psi = evolve_to_grid(sheet, packet().values, CLOCK, start)
        cr, to = clock_reversal(psi, SheetLabel(1))
        assert to == SheetLabel(-1)
        assert sheet_residual(sheet.opposite(), cr) < 1e-8
        assert sheet_residual(sheet, cr) > 1e-2
        assert np.array_equal(clock_reversal(cr, to)[0].values, psi.values)


def test_motion_reversal_breaks_for_time_dependent_h(moving_sheet):
    psi = evolve_to_grid(moving_sheet, packet().values, CLOCK, -1.0)
    assert sheet_residual(moving_sheet, motion_reversal(psi)) > 1e-3


def test_motion_reversal_needs_symmetric_clock():
    psi = GridWavefunction((Grid1D(0, 1, 16, "t"), X), np.zeros((16, X.n), complex), 0)
    with pytest.raises(InvalidArgumentError):
        motion_reversal(psi)


def test_taub_stationary_sheets_are_conjugates():
    w = 1.3
    om, s = Grid1D(-1.0, 0.3, 20, "Omega"), Grid1D(-2, 2, 20, "s")
    F = exp_mode_factor("K", -1.0, 6.0, w, om.points)
    plus = GridWavefunction((om, s), np.outer(F, np.exp(-1j * w * s.points)), 1)
    minus = GridWavefunction((om, s), np.outer(F, np.exp(1j * w * s.points)), 1)
    assert np.array_equal(clock_reversal(minus, SheetLabel(-1))[0].values, plus.values)


@settings(max_examples=25, deadline=None)
@given(st.floats(-2, 2), st.floats(-2, 2), st.floats(-2, 2), st.floats(-2, 2))
def test_antiunitarity(c1, k1, c2, k2):
    a, b = packet(c1, k1), packet(c2, k2)
    ta, tb = (GridWavefunction((X,), np.conj(v.values)) for v in (a, b))
    assert abs(tb.inner(ta) - np.conj(b.inner(a))) < 1e-12


GRIDS = (Grid1D(-1.0, 0.3, 120, "Omega"), Grid1D(-1.5, 1.5, 120, "phi"))


def taub_mode(coeffs, w=0.7):
    return mode_on_grid("taub", w, coeffs, TAUB, GRIDS)


def test_real_solution_splits_into_conjugate_parts():
    m = taub_mode({"a": 1, "d": 1})
    real = GridWavefunction(GRIDS, m.values + np.conj(m.values))
    d = decompose_c_cstar(real, [0.7], TAUB)
    assert d.reconstruction_error < 1e-6
    assert np.max(np.abs(d.c_part.values - np.conj(d.cstar_part.values))) < 1e-9 * np.max(np.abs(real.values))
    assert d.c_coefficients[0] == pytest.approx(1.0, abs=1e-9)


def test_imaginary_combination():
    m = taub_mode({"a": 1, "d": 1})
    im = GridWavefunction(GRIDS, 1j * (m.values - np.conj(m.values)))
    d = decompose_c_cstar(im, [0.7], TAUB)
    assert d.reconstruction_error < 1e-6
    assert d.c_coefficients[0] == pytest.approx(1j, abs=1e-9)
    assert d.cstar_coefficients[0] == pytest.approx(-1j, abs=1e-9)


def test_k_mode_has_both_components():
    d = decompose_c_cstar(taub_mode({"b": 1, "d": 1}), [0.7], TAUB)
    expected = np.pi / (2 * np.sinh(0.7 * np.pi))
    assert d.c_coefficients[0] == pytest.approx(1j * expected, rel=1e-9)
    assert d.cstar_coefficients[0] == pytest.approx(-1j * expected, rel=1e-9)


def test_not_a_solution_rejected(tmp_path):
    bad = GridWavefunction(GRIDS, np.outer(np.ones(120), exp_mode_factor("I", -1.0, -2.0, 0.7, GRIDS[1].points)))
    with pytest.raises(NotASolutionError) as exc:
        decompose_c_cstar(bad, [0.7], TAUB)
    assert exc.value.residual > 0.05
    d = decompose_c_cstar(taub_mode({"a": 1, "d": 1}), [0.7], TAUB)
    assert '"reconstruction_error"' in d.write_json(tmp_path / "d.json").read_text()
