import math
from dataclasses import replace

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from numpy.testing import assert_allclose

from massgap.elliptic import complete_K
from massgap.solutions import (
    DispersionError,
    FourMomentum,
    NoRealAnsatzError,
    ScalarWaveSolution,
    classical_residual_scalar,
    classical_residual_su2,
    dispersion_p2,
    eval_G1,
    scalar_amplitude_modulus,
    su2_solve,
    su2_system_residual,
)

K = complete_K(-1.0)


def test_massless_closed_form():
    amp, kappa = scalar_amplitude_modulus(2.0, 1.0)
    assert amp == pytest.approx(1.0, abs=1e-15)
    assert kappa == -1.0
    assert dispersion_p2(2.0, 1.0) == pytest.approx(1.0, abs=1e-15)
    amp, _ = scalar_amplitude_modulus(8.0, 1.0)
    assert amp == pytest.approx(2.0 ** -0.5, rel=1e-15)


def test_massive_limit_reduces_to_massless():
    a0, k0 = scalar_amplitude_modulus(2.0, 1.0)
    a1, k1 = scalar_amplitude_modulus(2.0, 1.0, 1e-12)
    assert abs(a1 - a0) < 1e-11 and abs(k1 - k0) < 1e-11


@pytest.mark.parametrize("lam,mu", [(2.0, 1.0), (0.5, 1.3), (8.0, 0.7), (20.0, 2.0)])
def test_scalar_residual_small(lam, mu):
    sol = ScalarWaveSolution(lam, mu)
    zeta = np.linspace(0.0, 4 * K, 100)
    assert classical_residual_scalar(sol, zeta) < 1e-8
    assert classical_residual_scalar(sol, zeta, richardson=True) < 1e-8


def test_scalar_residual_several_periods():
    sol = ScalarWaveSolution(2.0, 1.0, chi=0.4)
    zeta = np.linspace(0.0, 40 * K, 500)
    assert classical_residual_scalar(sol, zeta) < 1e-8


def test_residual_is_truncation_dominated_at_coarse_steps():
    # 4th-order stencil: halving h divides the residual by about 16, the
    # extrapolated pair by about 64, so the exact residual is zero
    sol = ScalarWaveSolution(2.0, 1.0)
    r = [classical_residual_scalar(sol, h=2.0**-j) for j in (4, 5, 6)]
    rr = [classical_residual_scalar(sol, h=2.0**-j, richardson=True) for j in (4, 5, 6)]
    for a, b in zip(r, r[1:]):
        assert 14.0 < a / b < 17.0
    for a, b in zip(rr, rr[1:]):
        assert 50.0 < a / b < 70.0


def test_massive_solution_residual():
    sol = ScalarWaveSolution(2.0, 1.0, msq=0.7)
    assert -1.0 < sol.kappa < 0.0
    assert classical_residual_scalar(sol) < 1e-8


def test_perturbed_amplitude_is_detected():
    sol = ScalarWaveSolution(2.0, 1.0)
    bad = ScalarWaveSolution(2.0, 1.01)
    assert classical_residual_scalar(sol, field=bad.value) > 1e-3


def test_four_momentum_algebra():
    p = FourMomentum.on_shell(1.5, 0.3, -0.4, 1.2)
    assert p.square == pytest.approx(1.5, rel=1e-14)
    assert_allclose(p.lower, [p.p0, -0.3, 0.4, -1.2])
    assert p.dot([1.0, 0.0, 0.0, 0.0]) == pytest.approx(p.p0)


def test_boosted_solution_matches_phase():
    p = FourMomentum.on_shell(1.0, 0.6)
    sol = ScalarWaveSolution(2.0, 1.0, p=p)
    x = np.array([[0.3, 0.2, 0.0, 0.0], [1.0, -0.5, 2.0, 3.0]])
    zeta = x[:, 0] * p.p0 - x[:, 1] * p.p1
    assert_allclose(eval_G1(sol, x), sol.value(zeta), rtol=1e-14)


def test_dispersion_violation_raises():
    with pytest.raises(DispersionError):
        ScalarWaveSolution(2.0, 1.0, p=FourMomentum(1.1))


@pytest.mark.parametrize("bad", [0.0, -1.0, math.inf])
def test_parameter_validation(bad):
    with pytest.raises(ValueError):
        ScalarWaveSolution(bad, 1.0)
    with pytest.raises(ValueError):
        ScalarWaveSolution(2.0, bad)


@settings(max_examples=40, deadline=None)
@given(st.floats(0.1, 30.0), st.floats(0.2, 3.0), st.floats(0.0, 2.0))
def test_scalar_residual_property(lam, mu, msq):
    sol = ScalarWaveSolution(lam, mu, msq)
    zeta = np.linspace(0.0, 4 * sol.quarter_period, 40)
    scale = max(1.0, lam * sol.amplitude**3, sol.p2 * sol.amplitude)
    assert classical_residual_scalar(sol, zeta) < 1e-8 * scale


# ------------------------------------------------------------------ SU(2)


@pytest.mark.parametrize("g,mu", [(1.0, 1.0), (4.0, 1.0), (2.0, 0.5)])
def test_landau_gauge_amplitudes(g, mu):
    p = FourMomentum.on_shell(mu * mu * g, 0.3, 0.4, -0.2)
    ans = su2_solve(p, 1.0, g, mu)
    assert_allclose(ans.amplitudes, mu / math.sqrt(g), rtol=1e-15)
    assert classical_residual_su2(ans) < 1e-8


def test_general_gauge_amplitudes():
    p = FourMomentum.on_shell(1.0, 1.0)
    ans = su2_solve(p, 2.0, 1.0, 1.0)
    assert_allclose(ans.amplitudes, [math.sqrt(0.5), math.sqrt(1.5), math.sqrt(1.5)], rtol=1e-14)
    assert su2_system_residual(ans) < 1e-14
    assert classical_residual_su2(ans) < 1e-8


def test_su2_off_shell_raises():
    with pytest.raises(DispersionError):
        su2_solve(FourMomentum(1.2), 1.0, 1.0, 1.0)


def test_su2_no_real_solution():
    with pytest.raises(NoRealAnsatzError):
        su2_solve(FourMomentum.on_shell(1.0, 10.0), 0.5, 1.0, 1.0)


def test_su2_perturbation_detected():
    p = FourMomentum.rest(1.0)
    ans = su2_solve(p, 1.0, 1.0, 1.0)
    bad = replace(ans, X=1.01)
    assert classical_residual_su2(bad) > 1e-3
