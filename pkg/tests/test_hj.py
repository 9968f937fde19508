import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from minisuperspace.errors import InvalidArgumentError, NoRealSolutionError
from minisuperspace.hj import (
    action_endpoint_difference,
    barred_variables,
    conserved_observables,
    hj_complete_solution,
)
from minisuperspace.model import PhaseState, integrate_trajectory, solve_momentum_on_constraint, uv_model


def trajectory(eta=1, m2=2.0, alpha=0.5, sign=1, steps=1000):
    m = uv_model(eta, m2)
    plus, minus = solve_momentum_on_constraint(m, PhaseState(np.array([0.3, -0.2]), np.array([0.0, alpha])), 0)
    return integrate_trajectory(m, plus if sign > 0 else minus, 1.3, steps, 1e-3)


@settings(max_examples=40, deadline=None)
@given(st.sampled_from([1, -1]), st.floats(0.1, 5), st.floats(-3, 3), st.floats(-1, 1), st.sampled_from([1, -1]))
def test_hj_residual_vanishes(eta, m2, alpha, E, sign):
    if alpha * alpha + eta * m2 - E < 0:
        with pytest.raises(NoRealSolutionError):
            hj_complete_solution(eta, m2, alpha, E, sign)
        return
    hj = hj_complete_solution(eta, m2, alpha, E, sign)
    u = np.linspace(-2, 2, 7)
    assert np.max(np.abs(hj.residual(u, 0.5 * u))) < 1e-12


def test_qbar_are_parameter_derivatives_of_w():
    hj = hj_complete_solution(1, 2.0, 0.5, 0.1)
    u, v, h = 0.7, -0.4, 1e-6
    W = lambda a, E: hj_complete_solution(1, 2.0, a, E).W(u, v)
    q0, q1 = hj.qbar(u, v)
    assert q0 == pytest.approx((W(0.5, 0.1 + h) - W(0.5, 0.1 - h)) / (2 * h), rel=1e-7)
    assert q1 == pytest.approx((W(0.5 + h, 0.1) - W(0.5 - h, 0.1)) / (2 * h), rel=1e-7)


def test_degenerate_and_invalid():
    hj = hj_complete_solution(-1, 1.0, 1.0, 0.0)
    assert hj.degenerate
    with pytest.raises(NoRealSolutionError):
        hj.qbar(0.1, 0.1)
    with pytest.raises(InvalidArgumentError):
        hj_complete_solution(2, 1.0, 0.0, 0.0)


@pytest.mark.parametrize("eta, sign", [(1, 1), (1, -1), (-1, 1)])
def test_observables_conserved(eta, sign):
    tr = trajectory(eta=eta, alpha=2.0, sign=sign)
    m = tr.model
    hj = hj_complete_solution(eta, 2.0, 2.0, 0.0, sign)
    rep = conserved_observables(tr, hj)
    assert rep.within()
    assert rep.hj_mismatch < 1e-12
    assert rep.gauge_defect < 1e-12
    assert max(abs(rep.bracket_qbar1), abs(rep.bracket_pbar1), abs(rep.bracket_gauge)) < 1e-8
    q0_start = barred_variables(m, tr.initial)[0]
    q0_end = barred_variables(m, tr.final)[0]
    assert q0_end - q0_start == pytest.approx(tr.lapse * (tr.taus[-1] - tr.taus[0]), rel=1e-12)


@pytest.mark.parametrize("f_kind", ["linear", "zero"])
def test_action_endpoint_identity(f_kind):
    tr = trajectory()
    hj = hj_complete_solution(1, 2.0, 0.5, 0.0)
    rep = action_endpoint_difference(tr, hj, f_kind)
    assert rep.difference < 1e-8
    assert abs(rep.endpoint_term) > 1.0  # the identity is not trivially 0 = 0
    with pytest.raises(InvalidArgumentError):
        action_endpoint_difference(tr, hj, "cubic")
