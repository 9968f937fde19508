import math

import mpmath as mp
import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from minisuperspace.errors import DomainError, UnsupportedRangeError
from minisuperspace.special import (
    bessel_J_imag,
    bessel_N_imag,
    bessel_table,
    envelope,
    evaluate,
    gamma,
    log_gamma,
    mod_bessel_I_imag,
    mod_bessel_K_imag,
)

mp.mp.dps = 30

ORACLES = {
    "K": mp.besselk,
    "I": mp.besseli,
    "J": mp.besselj,
    "N": mp.bessely,
}
FUNCS = {"K": mod_bessel_K_imag, "I": mod_bessel_I_imag, "J": bessel_J_imag, "N": bessel_N_imag}


def oracle(family, omega, x, derivative=False):
    f = ORACLES[family]
    nu = mp.mpc(0, omega)
    if derivative:
        return complex(mp.diff(lambda t: f(nu, t), x))
    return complex(f(nu, x))


@pytest.mark.parametrize("family", "KIJN")
@pytest.mark.parametrize("omega", [0.0, 0.5, 2.0, 10.0])
def test_against_mpmath(family, omega):
    xs = np.geomspace(1e-2, 30, 9)
    vals = FUNCS[family](omega, xs)
    ders = FUNCS[family](omega, xs, derivative=True)
    ref = np.array([oracle(family, omega, x) for x in xs])
    dref = np.array([oracle(family, omega, x, True) for x in xs])
    env = envelope(ref, dref, omega, xs)
    assert np.max(np.abs(vals - ref) / env) < 1e-10
    assert np.max(np.abs(ders - dref) / env) < 1e-9


def test_frozen_values():
    assert mod_bessel_K_imag(1.0, 1.0) == pytest.approx(0.289428037025992127, rel=1e-13)
    assert complex(mod_bessel_I_imag(2.0, 0.5)) == pytest.approx(-6.45954043780485125 - 1.40639853802913486j, rel=1e-13)
    assert complex(bessel_J_imag(0.5, 3.0)) == pytest.approx(-0.32246344924956489 + 0.33406063249443412j, rel=1e-13)
    assert complex(bessel_N_imag(0.5, 3.0)) == pytest.approx(0.50939857527461288 + 0.21146966057879964j, rel=1e-13)


@pytest.mark.parametrize("omega", [0.0, 1.0, 5.0])
def test_wronskians(omega):
    x = np.geomspace(0.05, 20, 11)
    wk = mod_bessel_I_imag(omega, x) * mod_bessel_K_imag(omega, x, True) - mod_bessel_I_imag(omega, x, True) * mod_bessel_K_imag(omega, x)
    wj = bessel_J_imag(omega, x) * bessel_N_imag(omega, x, True) - bessel_J_imag(omega, x, True) * bessel_N_imag(omega, x)
    assert np.max(np.abs(wk * x + 1.0)) < 1e-9
    assert np.max(np.abs(wj * x - 2.0 / math.pi)) < 1e-9


@settings(max_examples=30, deadline=None)
@given(st.floats(0.0, 20.0), st.floats(0.02, 25.0))
def test_conjugation_symmetries(omega, x):
    # real x: K_{iw} is real and I_{-iw} = conj(I_{iw})
    assert abs(complex(mod_bessel_K_imag(omega, x)).imag) == 0.0
    a, b = complex(mod_bessel_I_imag(omega, x)), complex(mod_bessel_I_imag(-omega, x))
    assert abs(a - b.conjugate()) <= 1e-12 * max(1.0, abs(a))


@settings(max_examples=30, deadline=None)
@given(st.floats(0.0, 10.0), st.floats(0.05, 20.0))
def test_k_from_i_pair(omega, x):
    if omega < 1e-3:
        return
    ip, im = complex(mod_bessel_I_imag(omega, x)), complex(mod_bessel_I_imag(-omega, x))
    k = math.pi / (2j * math.sinh(math.pi * omega)) * (im - ip)
    ref = float(mod_bessel_K_imag(omega, x))
    scale = max(abs(ip), abs(ref), 1e-300)
    assert abs(k - ref) <= 1e-10 * scale


def test_gamma_against_mpmath():
    for z in (0.3 + 2j, -1.7 + 0.4j, 5.5 - 3j, 1j * 10):
        assert gamma(z) == pytest.approx(complex(mp.gamma(z)), rel=1e-13)
        assert abs(log_gamma(z).real - float(mp.re(mp.loggamma(z)))) < 1e-12


def test_error_estimates_are_reported():
    r = evaluate("K", 2.0, 1.5)
    assert 0 <= r.est_error < 1e-12


def test_range_and_domain_errors():
    with pytest.raises(UnsupportedRangeError):
        mod_bessel_K_imag(51.0, 1.0)
    with pytest.raises(DomainError):
        mod_bessel_I_imag(1.0, 0.0)
    with pytest.raises(DomainError):
        bessel_J_imag(1.0, np.array([1.0, -2.0]))


def test_shapes_preserved():
    x = np.linspace(0.5, 2.0, 6).reshape(2, 3)
    assert mod_bessel_K_imag(1.0, x).shape == (2, 3)
    assert np.ndim(mod_bessel_K_imag(1.0, 0.5)) == 0


def test_table_rows():
    rows = bessel_table([1.0], [0.5, 2.0])
    assert len(rows) == 8
    assert {r[2] for r in rows} == {"I", "K", "J", "N"}
