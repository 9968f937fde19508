import numpy as np
import pytest

from minisuperspace.canonical import factorize_constraint
from minisuperspace.errors import InvalidArgumentError, NonPositiveSpectrumError
from minisuperspace.grids import Grid1D, GridWavefunction, second_derivative
from minisuperspace.model import taub_reduced_model, xy_model
from minisuperspace.modes import exp_mode_factor
from minisuperspace.quantum import (
    QuantumSheet,
    gaussian_bump,
    norm_drift,
    ordering_check,
    propagation_residual,
    propagator,
    reduced_spectrum,
    schrodinger_evolve,
    sheet_product_residual,
    spectral_sqrt,
)


def sheets(model, clock, grid):
    plus, minus = factorize_constraint(model, clock)
    return QuantumSheet.from_sheet(plus, grid), QuantumSheet.from_sheet(minus, grid)


def packet(grid, center=0.0, width=1.0, k=0.0):
    x = grid.points
    return GridWavefunction((grid,), np.exp(-0.5 * ((x - center) / width) ** 2 + 1j * k * x)).normalized()


def test_spectral_sqrt_squares_back(rng):
    M = rng.normal(size=(20, 20))
    h2 = M @ M.T + np.eye(20)
    h, E, U = spectral_sqrt(h2)
    assert np.allclose(h @ h, h2, atol=1e-10)
    assert np.all(E > 0)
    with pytest.raises(NonPositiveSpectrumError):
        spectral_sqrt(-np.eye(3))


def test_unitarity_both_sheets_time_dependent():
    g = Grid1D(-8, 8, 80, "y")
    for sh in sheets(xy_model(1.0), "x", g):
        assert sh.time_dependent
        st = schrodinger_evolve(sh, packet(g, k=1.0), np.linspace(-0.5, 0.5, 6), max_step=0.02)
        assert norm_drift(st) < 1e-8
        assert propagation_residual(sh, st, 0.02) < 1e-8


def test_commuting_family_matches_plain_exponential():
    g = Grid1D(-6, 2, 60, "x")
    h0 = sheets(xy_model(-1.0), "y", g)[0].h_matrix()
    fam = QuantumSheet.from_family(g, lambda t: (1 + t * t) * h0)
    ph = packet(g, -2.0, 0.7)
    st = schrodinger_evolve(fam, ph, [0.0, 1.0], max_step=0.05)
    lam, U = np.linalg.eigh(h0)
    exact = (U * np.exp(-1j * lam * 4.0 / 3.0)) @ U.T @ ph.values
    assert np.max(np.abs(st[-1].values - exact)) < 1e-8


def test_evolve_requires_normalized_input():
    g = Grid1D(-6, 2, 40, "x")
    sh = sheets(xy_model(-1.0), "y", g)[0]
    with pytest.raises(InvalidArgumentError):
        schrodinger_evolve(sh, GridWavefunction((g,), 2 * packet(g).values), [0, 1])


def test_propagator_group_property():
    g = Grid1D(-8, 8, 60, "y")
    sh = sheets(xy_model(1.0), "x", g)[0]
    U = propagator(sh, -0.3, 0.4, 0.01)
    V = propagator(sh, 0.4, -0.3, 0.01)
    assert np.max(np.abs(U @ V - np.eye(60))) < 1e-9


def test_sheet_products_time_independent():
    g, tg = Grid1D(-6, 2, 80, "x"), Grid1D(-1, 1, 41, "y")
    T, X = tg.points, g.points
    psi = GridWavefunction((tg, g), np.outer(np.exp(-T**2) * (1 + 0.3j * T), np.exp(-(X + 2) ** 2)), 0)
    rep = sheet_product_residual(sheets(xy_model(-1.0), "y", g), psi)
    assert rep.r_pm < 1e-8 and rep.r_mp < 1e-8 and rep.symmetrized_residual < 1e-8


def test_sheet_products_time_dependent_commutator():
    g, tg = Grid1D(-8, 8, 80, "y"), Grid1D(-1, 1, 81, "x")
    T, Y = tg.points, g.points
    psi = GridWavefunction((tg, g), np.outer(np.exp(-T**2) * (1 + 0.3j * T), np.exp(-Y**2 / 2)), 0)
    rep = sheet_product_residual(sheets(xy_model(1.0), "x", g), psi)
    assert rep.commutator_norm > 1e-3
    assert abs(rep.r_pm - rep.commutator_norm) < 0.05 * rep.commutator_norm
    assert rep.symmetrized_residual < 1e-8


def test_taub_eigenfunctions_are_k_modes():
    sh = QuantumSheet.from_sheet(factorize_constraint(taub_reduced_model(-0.5), "s")[0], Grid1D(-6, 1.0, 400, "Omega"))
    rs = reduced_spectrum(sh, 4)
    gram = rs.eigenfunctions.conj() @ rs.eigenfunctions.T * sh.grid.spacing
    assert np.max(np.abs(gram - np.eye(4))) < 1e-12
    for E, v in zip(rs.energies, rs.eigenfunctions):
        ref = exp_mode_factor("K", -1.0, 6.0, E, sh.grid.points).astype(complex)
        c = np.vdot(ref, v) / np.vdot(ref, ref)
        assert np.linalg.norm(v - c * ref) / np.linalg.norm(v) < 1e-3


def test_h_dot_matches_finite_difference():
    g = Grid1D(-8, 8, 40, "y")
    sh = sheets(xy_model(1.0), "x", g)[0]
    step = 1e-4
    fd = (sh.h_matrix(0.2 + step) - sh.h_matrix(0.2 - step)) / (2 * step)
    assert np.max(np.abs(sh.h_dot(0.2) - fd)) < 1e-6 * np.max(np.abs(fd))


@pytest.mark.parametrize("A, C, b, first, zeroth", [(0.0, 0.0, 1.0, 1.0, 0.0), (0.3, 0.5, 1.0, 1.2, 0.35)])
def test_ordering_correction_terms(A, C, b, first, zeroth):
    rep = ordering_check(A, C, b, Grid1D(-3, 3, 301), [gaussian_bump(0, 0.4), gaussian_bump(0.5, 0.3)])
    assert rep.first_order_coefficient == pytest.approx(first, rel=1e-2)
    assert rep.zeroth_order_coefficient == pytest.approx(zeroth, abs=1e-2)


def test_ordering_trivial_when_c_zero_and_a_equals_b():
    rep = ordering_check(0.7, 0.0, 0.7, Grid1D(-3, 3, 301), [gaussian_bump(0, 0.4)])
    assert rep.max_deviation < 1e-8


def test_free_particle_spectrum_positive():
    g = Grid1D(-10, 10, 200, "x")
    h2 = -second_derivative(g, 4) + np.eye(g.n)
    sh = QuantumSheet(g, lambda t: h2)
    assert np.all(reduced_spectrum(sh, 5).energies >= 1.0 - 1e-12)
