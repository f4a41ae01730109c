import math
import warnings

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from numpy.testing import assert_allclose

from massgap.elliptic import complete_K
from massgap.lattice import TimeSeries, analyse_spectrum
from massgap.spectral import (
    NearPoleWarning,
    UnphysicalMassWarning,
    dimreg_I2,
    greens_jump_check,
    kappa0,
    kappa0_tail_bound,
    kernel_period,
    line_factor,
    mass_correction,
    mass_correction_coefficients,
    mass_n,
    position_kernel_rest_frame,
    propagator_momentum,
    propagator_tail_bound,
    spectrum,
    weight_bound,
    weight_n,
    weight_prefactor,
)

K = complete_K(-1.0)


def _weight_oracle(n):
    # independent restatement of the closed form
    x = math.exp(-math.pi)
    return (math.pi**3 / (4 * K**3)) * x ** (n + 0.5) / (1 + x ** (2 * n + 1)) * (2 * n + 1) ** 2


def test_mass_values():
    assert_allclose(mass_n(0, 2.0, 1.0), math.pi / (2 * 1.3110287771460598), rtol=1e-15)
    assert_allclose(mass_n(0, 2.0, 1.0), 1.198140, atol=1e-6)
    assert_allclose(mass_n(1, 2.0, 1.0), 3.594420, atol=1e-6)
    assert_allclose(mass_n(3, 32.0, 1.0), 2 * mass_n(3, 2.0, 1.0), rtol=1e-15)


@settings(max_examples=50, deadline=None)
@given(st.integers(0, 50), st.floats(0.01, 100.0), st.floats(0.01, 10.0))
def test_mass_ratio_exact(n, lam, mu):
    assert mass_n(n, lam, mu) / mass_n(0, lam, mu) == pytest.approx(2 * n + 1, rel=1e-15)


def test_mass_rejects_negative_level():
    with pytest.raises(ValueError):
        mass_n(-1, 2.0, 1.0)


def test_weights():
    assert_allclose(weight_prefactor(), math.pi**3 / (4 * 1.3110287771460598**3), rtol=1e-14)
    assert_allclose(weight_prefactor(), 3.439957, atol=1e-6)
    assert_allclose(line_factor(0), 0.199268, atol=1e-6)
    assert_allclose(weight_n(0), 0.68547, atol=1e-4)
    for n in range(25):
        assert_allclose(weight_n(n), _weight_oracle(n), rtol=1e-14)
        assert 0 < weight_n(n) <= weight_bound(n)
    assert weight_n(6) < 1e-6


def test_weight_sum_monotone_to_one():
    partial = np.cumsum([weight_n(n) for n in range(21)])
    steps = np.diff(partial)
    assert np.all(steps[:12] > 0) and np.all(steps >= 0) and np.all(partial < 1 + 1e-14)
    assert abs(spectrum(2.0, 1.0).total_weight - 1.0) < 1e-6
    assert abs(spectrum(2.0, 1.0).total_weight - 1.0) < 1e-14


def test_weight_sum_two_strategies():
    # forward summation with fsum versus backward plain summation
    fwd = spectrum(2.0, 1.0, 30).total_weight
    bwd = 0.0
    for n in range(30, -1, -1):
        bwd += _weight_oracle(n)
    assert abs(fwd - bwd) < 1e-10


def test_tail_bound():
    s = spectrum(2.0, 1.0, 5)
    missing = 1.0 - s.total_weight
    assert 0 < missing <= s.tail_bound


def test_propagator_at_zero():
    g = propagator_momentum(0.0, 2.0, 1.0)
    assert abs(g.real + 0.5) < 1e-3
    oracle = -sum(_weight_oracle(n) / mass_n(n, 2.0, 1.0) ** 2 for n in range(21))
    assert abs(g.real - oracle) < 1e-12


def test_propagator_ultraviolet():
    m0 = mass_n(0, 2.0, 1.0)
    for factor, tol in ((1000.0, 0.02), (1e5, 1e-3)):
        p2 = factor * m0 * m0
        assert abs(p2 * propagator_momentum(p2, 2.0, 1.0).real - 1.0) < tol


def test_propagator_at_hundred_m0_squared():
    # the leading 1/p**2 behaviour sets in slowly: 5% off at 100 m0**2
    m0 = mass_n(0, 2.0, 1.0)
    p2 = 100 * m0 * m0
    assert_allclose(p2 * propagator_momentum(p2, 2.0, 1.0).real, 1.04906, atol=1e-5)


def test_propagator_spacelike_negative():
    for p2 in (-0.1, -5.0, -300.0):
        g = propagator_momentum(p2, 2.0, 1.0)
        assert g.real < 0 and abs(g.imag) < 1e-9


def test_residue():
    m0 = mass_n(0, 2.0, 1.0)
    d = 1e-7
    g = propagator_momentum(m0 * m0 + d, 2.0, 1.0, epsilon=1e-14)
    assert_allclose(d * g.real, weight_n(0), rtol=1e-5)


def test_near_pole_warning():
    m0 = mass_n(0, 2.0, 1.0)
    with pytest.warns(NearPoleWarning):
        g = propagator_momentum(m0 * m0, 2.0, 1.0, epsilon=1e-6)
    assert np.isfinite(g.imag) and g.imag < 0


def test_propagator_tail_bound_covers_truncation():
    for p2 in (-10.0, 0.0, 2.0):
        full = propagator_momentum(p2, 2.0, 1.0, n_max=40)
        short = propagator_momentum(p2, 2.0, 1.0, n_max=3)
        assert abs(full - short) <= propagator_tail_bound(p2, 2.0, 1.0, 3)


def test_propagator_preconditions():
    with pytest.raises(ValueError):
        propagator_momentum(0.0, 2.0, 1.0, n_max=0)
    with pytest.raises(ValueError):
        propagator_momentum(0.0, 2.0, 1.0, epsilon=0.0)


# ----------------------------------------------------------------- kernel


def test_kernel_support_and_start():
    t = np.linspace(-5.0, 0.0, 11)
    assert np.all(position_kernel_rest_frame(t, 2.0, 1.0) == 0.0)
    assert abs(position_kernel_rest_frame(1e-12, 2.0, 1.0)) < 1e-11
    adv = position_kernel_rest_frame(np.linspace(0.0, 5.0, 11), 2.0, 1.0, branch="advanced")
    assert np.all(adv == 0.0)


def test_kernel_period():
    T = kernel_period(2.0, 1.0)
    assert_allclose(T, 4 * K, rtol=1e-15)
    t = np.linspace(0.1, 3.0, 30)
    assert_allclose(position_kernel_rest_frame(t + T, 2.0, 1.0),
                    position_kernel_rest_frame(t, 2.0, 1.0), atol=1e-14)
    assert_allclose(kernel_period(32.0, 1.0), T / 2, rtol=1e-15)


def test_kernel_branch_validation():
    with pytest.raises(ValueError):
        position_kernel_rest_frame(1.0, 2.0, 1.0, branch="feynman")


@pytest.mark.parametrize("k", [0, 1, 2])
@pytest.mark.parametrize("branch", ["retarded", "advanced"])
def test_greens_jump(k, branch):
    res = greens_jump_check(2.0, 1.0, k, branch)
    assert res.passed
    assert res.jump_error < 1e-8 and res.ode_residual < 1e-8


@pytest.mark.parametrize("lam,mu", [(0.5, 1.0), (7.3, 0.4), (2.0, 3.0)])
def test_greens_jump_parameter_free(lam, mu):
    res = greens_jump_check(lam, mu)
    assert res.jump_error < 1e-8 and res.ode_residual < 1e-8


def test_wrong_phase_fails():
    res = greens_jump_check(2.0, 1.0, phase=0.5 * K)
    assert res.jump_error > 0.1
    assert not res.passed


def test_two_sided_kernel_has_no_jump():
    res = greens_jump_check(2.0, 1.0, branch="two-sided")
    assert abs(res.jump) < 1e-8


def test_kernel_fourier_lines():
    T = kernel_period(2.0, 1.0)
    dt = T / 64
    t = dt * np.arange(1, 40 * 64 + 1)
    an = analyse_spectrum(TimeSeries(position_kernel_rest_frame(t, 2.0, 1.0), dt, dt))
    assert abs(an.fundamental / mass_n(0, 2.0, 1.0) - 1) < 1e-3
    assert abs(an.frequencies[2] / mass_n(1, 2.0, 1.0) - 1) < 1e-3
    # cn dn carries the line factors b_n times (2n + 1)
    assert_allclose(an.harmonics[2], 3 * line_factor(1) / line_factor(0), rtol=1e-3)


# --------------------------------------------------------- regularization


def test_kappa0():
    assert abs(kappa0() - 1.215018785) < 1e-8
    assert abs(kappa0(3) - 1.2101) < 1e-3
    assert_allclose(kappa0(0), line_factor(0), rtol=1e-15)
    assert kappa0_tail_bound(12) < 1e-12


def test_kappa0_two_strategies():
    direct = kappa0(40)
    x = math.exp(-math.pi)
    # expand 1/(1 + x**(2n+1)) as a geometric series and resum by powers
    alt = 0.0
    for j in range(8):
        alt += (-1) ** j * sum((2 * n + 1) ** 4 * x ** ((n + 0.5) + j * (2 * n + 1))
                               for n in range(40))
    assert abs(direct - alt) < 1e-10


def test_pole_coefficient_series_oracle():
    r = dimreg_I2(2.0, 1.0)
    oracle = sum(weight_n(n) * mass_n(n, 2.0, 1.0) ** 2 for n in range(21)) / (16 * math.pi**2)
    assert abs(r.pole_coefficient - oracle) < 1e-8
    assert_allclose(r.pole_coefficient, 0.0379954438659, rtol=1e-10)
    closed = math.pi**5 / (16 * K**5) * kappa0() / (16 * math.pi**2)
    assert_allclose(r.pole_coefficient, closed, rtol=1e-12)
    assert r.imaginary_unit


def test_pole_coefficient_ratio_to_printed():
    r = dimreg_I2(2.0, 1.0)
    assert_allclose(r.ratio_to_printed, 1 / math.sqrt(2), rtol=1e-12)
    direct, printed = mass_correction_coefficients()
    assert_allclose(printed, 0.1139863316, rtol=1e-9)
    assert round(printed, 4) == 0.1140
    assert_allclose(direct / printed, 1 / math.sqrt(2), rtol=1e-12)


def test_scale_dependence():
    a = dimreg_I2(2.0, 1.0, 1.0)
    b = dimreg_I2(2.0, 1.0, 2.0)
    assert a.pole_coefficient == b.pole_coefficient
    assert_allclose(b.finite_part - a.finite_part, 2 * math.log(2) * a.pole_coefficient,
                    rtol=1e-12)
    with pytest.raises(ValueError):
        dimreg_I2(2.0, 1.0, 0.0)


def test_mass_correction():
    assert mass_correction(2.0, 0.0) == 0.0
    assert mass_correction(2.0, 0.1) == pytest.approx(0.6)
    with pytest.warns(UnphysicalMassWarning):
        assert mass_correction(1.0, -0.5) == -1.5
    with warnings.catch_warnings():
        warnings.simplefilter("error")
        mass_correction(1.0, 0.5)
