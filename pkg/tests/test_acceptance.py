"""Acceptance suite: one PASS/FAIL line per criterion (run with ``pytest -s`` to see them)."""

import math
from pathlib import Path

import mpmath as mp
import numpy as np
import pytest

from minisuperspace.canonical import TimeCandidate, factorize_constraint, intrinsic_time_check, sample_on_constraint
from minisuperspace.cli import run
from minisuperspace.fourier import generalized_fourier, inverse_generalized_fourier, taub_sinh_kernel
from minisuperspace.grids import Grid1D, GridWavefunction
from minisuperspace.hj import action_endpoint_difference, conserved_observables, hj_complete_solution
from minisuperspace.model import (
    PhaseState,
    dilaton_model_flat,
    dilaton_model_lambda0,
    integrate_trajectory,
    motion_reverse_trajectory,
    solve_momentum_on_constraint,
    taub_model,
    uv_model,
    xy_model,
)
from minisuperspace.modes import direct_sum_split, mode_on_grid, observed_orders, wdw_convergence
from minisuperspace.quantum import (
    QuantumSheet,
    gaussian_bump,
    norm_drift,
    ordering_check,
    schrodinger_evolve,
    sheet_product_residual,
)
from minisuperspace.scenario import bundled_scenarios, load_scenario
from minisuperspace.special import (
    bessel_J_imag,
    bessel_N_imag,
    envelope,
    mod_bessel_I_imag,
    mod_bessel_K_imag,
)


def verdict(number: int, ok: bool, detail: str) -> None:
    print(f"\n{'PASS' if ok else 'FAIL'} criterion {number}: {detail}")
    assert ok, detail


def sheets(model, clock, grid):
    plus, minus = factorize_constraint(model, clock)
    return QuantumSheet.from_sheet(plus, grid), QuantumSheet.from_sheet(minus, grid)


def packet(grid, center=0.0, width=1.0, k=0.0):
    x = grid.points
    return GridWavefunction((grid,), np.exp(-0.5 * ((x - center) / width) ** 2 + 1j * k * x)).normalized()


def test_criterion_01_special_functions():
    mp.mp.dps = 30
    oracles = {"K": mp.besselk, "I": mp.besseli, "J": mp.besselj, "N": mp.bessely}
    funcs = {"K": mod_bessel_K_imag, "I": mod_bessel_I_imag, "J": bessel_J_imag, "N": bessel_N_imag}
    xs = np.geomspace(1e-2, 30, 25)
    worst, worst_w = 0.0, 0.0
    for w in (0.0, 0.5, 1.0, 2.0, 5.0, 10.0):
        nu = mp.mpc(0, w)
        for fam, f in funcs.items():
            ref = np.array([complex(oracles[fam](nu, x)) for x in xs])
            dref = np.array([complex(mp.diff(lambda t: oracles[fam](nu, t), x)) for x in xs])
            worst = max(worst, float(np.max(np.abs(f(w, xs) - ref) / envelope(ref, dref, w, xs))))
        I, K = mod_bessel_I_imag(w, xs), mod_bessel_K_imag(w, xs)
        J, N = bessel_J_imag(w, xs), bessel_N_imag(w, xs)
        Ip, Kp = mod_bessel_I_imag(w, xs, True), mod_bessel_K_imag(w, xs, True)
        Jp, Np = bessel_J_imag(w, xs, True), bessel_N_imag(w, xs, True)
        # relative to the size of the two cancelling products (|J|, |N| grow like e^{pi w / 2} at small x)
        wk = np.abs(xs * (I * Kp - Ip * K) + 1.0) / (xs * (np.abs(I * Kp) + np.abs(Ip * K)))
        wj = np.abs(xs * (J * Np - Jp * N) - 2.0 / math.pi) / (xs * (np.abs(J * Np) + np.abs(Jp * N)))
        worst_w = max(worst_w, float(np.max(wk)), float(np.max(wj)))
    verdict(1, worst < 1e-10 and worst_w < 1e-9, f"max oracle error {worst:.2e} (< 1e-10), scaled Wronskian {worst_w:.2e} (< 1e-9)")


def test_criterion_02_wdw_orders():
    cases = [
        ("zeta_neg", {"zeta": -1.0}, xy_model(-1.0), [(-1, 1), (-1, 1)], {"a+": 1, "b-": 1}),
        ("zeta_pos", {"zeta": 1.0}, xy_model(1.0), [(-1, 1), (-1, 1)], {"a+": 1, "b+": 1}),
        ("taub", {"cbar": -0.5, "lam": 1.0}, taub_model(-0.5, 1.0), [(-0.5, 0.25), (-1, 1)], {"a": 1, "d": 1}),
    ]
    orders = {}
    for case, params, model, box, coeffs in cases:
        g = [Grid1D(lo, hi, 32, lab) for (lo, hi), lab in zip(box, model.coordinate_labels)]
        res = wdw_convergence(lambda gg: mode_on_grid(case, 1.0, coeffs, params, gg), model, g, 2)
        orders[case] = observed_orders(res)
    ok = all(abs(o - 2.0) < 0.2 for v in orders.values() for o in v)
    verdict(2, ok, "observed orders " + ", ".join(f"{k}: {[round(o, 3) for o in v]}" for k, v in orders.items()))


def test_criterion_03_direct_sum():
    rng = np.random.default_rng(20261014)
    g_x, g_y = Grid1D(-2.0, 1.0, 48, "x"), Grid1D(-3.0, 3.0, 64, "y")
    omegas = np.sort(rng.uniform(0.3, 2.5, 8))
    amps, phases = rng.normal(size=8), rng.uniform(0, 2 * np.pi, 8)
    F = lambda w, x: mod_bessel_K_imag(w, np.exp(x))
    vals = sum(a * np.outer(F(w, g_x.points), np.cos(w * g_y.points + th)) for a, w, th in zip(amps, omegas, phases))
    split = direct_sum_split(GridWavefunction((g_x, g_y), vals + 0j), omegas, F, clock_axis=1)
    verdict(3, split.reconstruction_error < 1e-8, f"8-mode real packet reconstruction error {split.reconstruction_error:.2e} (< 1e-8)")


def test_criterion_04_generalized_fourier():
    g = Grid1D(-1.0, 1.5, 16, "phi")
    fits = {}
    for w in (0.5, 1.0, 2.0):
        _, rep = generalized_fourier(
            taub_sinh_kernel(1.0), lambda s, w=w: np.exp(-1j * w * s), g, (0.0, 6.0), contour="loop", panels=48,
            reference=lambda p, w=w: mod_bessel_I_imag(w, np.exp(-p)),
        )
        fits[w] = rep.fit_error
    w = 0.5
    sg = Grid1D(-3, 3, 31, "s")
    out, _ = inverse_generalized_fourier(
        taub_sinh_kernel(1.0), lambda p: mod_bessel_K_imag(w, np.exp(-p)), sg, (-6.0, 30.0), panels=100, taper=0.05, tol=1e-6
    )
    B = np.column_stack([np.exp(1j * w * sg.points), np.exp(-1j * w * sg.points)])
    c, *_ = np.linalg.lstsq(B, out.values, rcond=None)
    secondary = float(min(abs(c)) / max(abs(c)))
    ok = max(fits.values()) < 1e-3 and secondary > 0.1
    verdict(4, ok, f"I fit errors {[f'{e:.1e}' for e in fits.values()]} (< 1e-3); K secondary amplitude {secondary:.3f} (> 0.1)")


def test_criterion_05_sheet_products():
    g, tg = Grid1D(-6, 2, 80, "x"), Grid1D(-1, 1, 41, "y")
    T, X = tg.points, g.points
    psi = GridWavefunction((tg, g), np.outer(np.exp(-T**2) * (1 + 0.3j * T), np.exp(-(X + 2) ** 2)), 0)
    static = sheet_product_residual(sheets(xy_model(-1.0), "y", g), psi)
    g2, tg2 = Grid1D(-8, 8, 80, "y"), Grid1D(-1, 1, 81, "x")
    T2, Y = tg2.points, g2.points
    psi2 = GridWavefunction((tg2, g2), np.outer(np.exp(-T2**2) * (1 + 0.3j * T2), np.exp(-Y**2 / 2)), 0)
    moving = sheet_product_residual(sheets(xy_model(1.0), "x", g2), psi2)
    rel = abs(moving.r_pm - moving.commutator_norm) / moving.commutator_norm
    ok = (
        max(static.r_pm, static.r_mp) < 1e-8
        and rel < 0.05
        and max(static.symmetrized_residual, moving.symmetrized_residual) < 1e-8
    )
    verdict(
        5, ok,
        f"static product residual {max(static.r_pm, static.r_mp):.1e}; time-dependent deviation vs commutator {rel:.2%}; "
        f"symmetrized {max(static.symmetrized_residual, moving.symmetrized_residual):.1e}",
    )


def test_criterion_06_ordering():
    grid = Grid1D(-3, 3, 301)
    trivial = ordering_check(0.7, 0.0, 0.7, grid, [gaussian_bump(0, 0.4), gaussian_bump(0.5, 0.3)])
    corr = ordering_check(0.0, 0.0, 1.0, grid, [gaussian_bump(0, 0.4), gaussian_bump(0.5, 0.3)])
    # hand expansion at A = 0, C = 0, b = 1: first-order coefficient 1, no zeroth-order term
    rel = abs(corr.first_order_coefficient - 1.0)
    ok = trivial.max_deviation < 1e-8 and rel < 1e-2 and abs(corr.zeroth_order_coefficient) < 1e-2
    verdict(6, ok, f"A=b, C=0 deviation {trivial.max_deviation:.1e}; correction coefficient mismatch {rel:.2%}")


CLOCKS = [
    ("zeta>0 +x", xy_model(1.0), TimeCandidate.intrinsic(0, 1), 0, -1),
    ("zeta>0 -x", xy_model(1.0), TimeCandidate.intrinsic(0, -1), 0, 1),
    ("zeta<0 +y", xy_model(-1.0), TimeCandidate.intrinsic(1, 1), 1, 1),
    ("zeta<0 -y", xy_model(-1.0), TimeCandidate.intrinsic(1, -1), 1, -1),
    ("lambda!=0, k=0 Omega", dilaton_model_flat(0.0, 1.0), TimeCandidate.intrinsic(0, -1), 0, 1),
    ("lambda=0, k=1 phi", dilaton_model_lambda0(0.0, 1.0), TimeCandidate.intrinsic(1, 1), 1, 1),
    ("Taub +s", taub_model(-0.5, 1.0), TimeCandidate.taub_s(1.0), 0, 1),
]


def test_criterion_07_time_identification():
    results = {}
    for label, model, cand, axis, root in CLOCKS:
        results[label] = intrinsic_time_check(model, cand, sample_on_constraint(model, 200, axis, root, seed=4)).is_global
    # the wrong clock for zeta < 0 must be rejected
    results["zeta<0 x rejected"] = not intrinsic_time_check(
        xy_model(-1.0), TimeCandidate.intrinsic(0, 1), sample_on_constraint(xy_model(-1.0), 200, 1, 1, seed=4)
    ).is_global
    bad = [k for k, v in results.items() if not v]
    verdict(7, not bad, f"{len(results) - len(bad)}/{len(results)} clock assignments reproduced on 200 samples" + (f"; failed {bad}" if bad else ""))


# +x orbits for zeta > 0 climb the e^{2x} wall and reach x = infinity at finite
# N tau ~ 0.6; a small lapse keeps 1e4 steps inside the solution's lifetime
LAPSE = {"zeta>0 +x": 0.02}


def test_criterion_08_classical_dynamics():
    worst_drift, worst_ratio, violations, n = 0.0, 0.0, 0, 0
    for label, model, cand, axis, root in CLOCKS:
        for s in sample_on_constraint(model, 2, axis, root, (-0.5, 0.5), (-0.5, 0.5), seed=8):
            tr = integrate_trajectory(model, s, LAPSE.get(label, 1.0), 10_000, 1e-3, method="yoshida4")
            f = cand.as_function()
            steps = np.diff([f(q, p) for q, p in zip(tr.qs, tr.ps)])
            violations += not (np.all(steps > 0) or np.all(steps < 0))
            back = motion_reverse_trajectory(tr)
            trip = max(np.max(np.abs(back.qs[-1] - tr.qs[0])), np.max(np.abs(back.ps[-1] + tr.ps[0])))
            worst_drift = max(worst_drift, tr.max_drift)
            worst_ratio = max(worst_ratio, trip / max(tr.max_drift, 1e-14))
            n += 1
    ok = worst_drift < 1e-6 and violations == 0 and worst_ratio <= 10
    verdict(8, ok, f"{n} trajectories x 1e4 steps: drift {worst_drift:.1e} (< 1e-6), clock violations {violations}, round-trip/drift {worst_ratio:.2f} (<= 10)")


def test_criterion_09_unitarity():
    g = Grid1D(-8, 8, 80, "y")
    drifts = []
    for sh in sheets(xy_model(1.0), "x", g):
        st = schrodinger_evolve(sh, packet(g, k=1.0), np.linspace(-0.5, 0.5, 6), max_step=0.02)
        drifts.append(norm_drift(st))
    gx = Grid1D(-6, 2, 60, "x")
    h0 = sheets(xy_model(-1.0), "y", gx)[0].h_matrix()
    fam = QuantumSheet.from_family(gx, lambda t: (1 + t * t) * h0)
    ph = packet(gx, -2.0, 0.7)
    st = schrodinger_evolve(fam, ph, [0.0, 1.0], max_step=0.05)
    lam, U = np.linalg.eigh(h0)
    exact = (U * np.exp(-1j * lam * 4.0 / 3.0)) @ U.T @ ph.values
    ordered = float(np.max(np.abs(st[-1].values - exact)))
    ok = max(drifts) < 1e-8 and ordered < 1e-8
    verdict(9, ok, f"norm drift per unit time {max(drifts):.1e} on both sheets (< 1e-8); ordered vs plain exponential {ordered:.1e} (< 1e-8)")


def test_criterion_10_hamilton_jacobi():
    m = uv_model(1, 2.0)
    hj_res, within, action = 0.0, True, 0.0
    for alpha in (0.5, 2.0):
        for sign in (1, -1):
            s0 = solve_momentum_on_constraint(m, PhaseState(np.array([0.3, -0.2]), np.array([0.0, alpha])), 0)
            tr = integrate_trajectory(m, s0[0] if sign > 0 else s0[1], 1.3, 1000, 1e-3)
            hj = hj_complete_solution(1, 2.0, alpha, 0.0, sign)
            u = np.linspace(-2, 2, 9)
            hj_res = max(hj_res, float(np.max(np.abs(hj.residual(u, u)))))
            within &= conserved_observables(tr, hj).within()
            for kind in ("linear", "zero"):
                action = max(action, action_endpoint_difference(tr, hj, kind).difference)
    ok = hj_res < 1e-12 and within and action < 1e-8
    verdict(10, ok, f"HJ residual {hj_res:.1e} (< 1e-12); observables within 10x drift: {within}; action endpoint identity {action:.1e} (< 1e-8)")


def _tree(folder: Path) -> dict:
    return {str(p.relative_to(folder)): p.read_bytes() for p in sorted(folder.rglob("*")) if p.is_file() and p.name != "timings.json"}


def test_criterion_11_determinism(tmp_path):
    differing = []
    names = sorted(bundled_scenarios())
    for name in names:
        scen = load_scenario(bundled_scenarios()[name])
        a = run(scen, tmp_path / name / "a")
        b = run(scen, tmp_path / name / "b", jobs=4)
        if not (a.ok and b.ok) or _tree(tmp_path / name / "a") != _tree(tmp_path / name / "b"):
            differing.append(name)
    verdict(11, not differing, f"{len(names) - len(differing)}/{len(names)} bundled scenarios byte-identical across two runs (timings excluded)")
