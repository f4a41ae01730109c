import math

import numpy as np
import pytest
from numpy.testing import assert_allclose

from massgap.elliptic import complete_K
from massgap.lattice import (
    BlowUpError,
    CFLError,
    LatticeGrid,
    SeriesTooShortError,
    State,
    TimeSeries,
    analyse_spectrum,
    convergence_study,
    energy,
    evolve,
    exact_field,
    initial_state,
    measure_mass_gap,
    phase_velocity,
)
from massgap.spectral import line_factor, mass_n

K = complete_K(-1.0)


def _period(lam, mu):
    return LatticeGrid.rest_frame(lam, mu, 1).dt


def test_rest_frame_energy_conserved_exactly_along_solution():
    grid = LatticeGrid.rest_frame(2.0, 1.0)
    es = [energy(State(*exact_field(grid, 2.0, 1.0, t)), 2.0) for t in np.linspace(0, 7, 50)]
    assert np.ptp(es) < 1e-10


def test_energy_zero_and_scaling():
    assert energy(State(np.zeros(4), np.zeros(4)), 2.0) == 0.0
    grid = LatticeGrid.rest_frame(2.0, 1.0)
    st = initial_state(grid, 2.0, 1.0, chi=0.7)
    e1 = energy(st, 2.0)
    e2 = energy(State(2 * st.phi, 2 * st.pi), 2.0)
    assert 4.0 < e2 / e1 < 16.0


def test_zero_data_stays_zero():
    grid = LatticeGrid.rest_frame(2.0, 1.0, 256)
    res = evolve(grid, 2.0, 1.0, 3 * _period(2.0, 1.0), state=State(np.zeros(1), np.zeros(1)))
    assert np.all(res.series.values == 0.0)


def test_energy_drift_100_periods():
    grid = LatticeGrid.rest_frame(2.0, 1.0)
    res = evolve(grid, 2.0, 1.0, 100 * _period(2.0, 1.0), sample_every=4)
    assert res.energy_drift < 1e-6


def test_verlet_error_ten_periods():
    grid = LatticeGrid.rest_frame(2.0, 1.0, 1024)
    res = evolve(grid, 2.0, 1.0, 10 * _period(2.0, 1.0))
    # 2nd-order scheme at T/1024: about 1.6e-4
    assert 1e-4 < res.final_error < 3e-4


def test_yoshida_error_ten_periods():
    grid = LatticeGrid.rest_frame(2.0, 1.0, 1024)
    res = evolve(grid, 2.0, 1.0, 10 * _period(2.0, 1.0), scheme="yoshida4")
    assert res.final_error < 1e-6


def test_second_order_convergence():
    errors, orders = convergence_study(2.0, 1.0)
    assert len(orders) == 3
    assert np.all(np.abs(orders - 2.0) < 0.1)
    assert np.all(np.abs(errors[:-1] / errors[1:] - 4.0) < 0.3)


def test_fourth_order_convergence():
    _, orders = convergence_study(2.0, 1.0, steps_per_period=(64, 128, 256), scheme="yoshida4")
    assert np.all(np.abs(orders - 4.0) < 0.2)


def test_travelling_wave():
    grid = LatticeGrid.travelling()
    p0 = math.sqrt(1.0 + 1.0)
    res = evolve(grid, 2.0, 1.0, 5 * 4 * K / p0)
    assert res.energy_drift < 1e-6
    assert res.final_error < 1e-4
    assert abs(phase_velocity(res, grid) / p0 - 1.0) < 1e-3


def test_travelling_wave_ten_periods_error():
    grid = LatticeGrid.travelling()
    p0 = math.sqrt(2.0)
    res = evolve(grid, 2.0, 1.0, 10 * 4 * K / p0, sample_every=8)
    assert res.final_error < 1e-4


def test_cfl_violation():
    with pytest.raises(CFLError):
        LatticeGrid.travelling(dt_frac=0.5)


def test_incommensurate_box():
    with pytest.raises(ValueError):
        LatticeGrid(1, 100, 0.01, 0.001, p1=1.0)


def test_blow_up_detected():
    grid = LatticeGrid.rest_frame(2.0, 1.0, 256)
    # negative coupling: the quartic force pushes away from the origin
    st = State(np.array([1.0]), np.array([0.0]))
    with pytest.raises(BlowUpError):
        evolve(grid, -2.0, 1.0, 50.0, state=st)


def test_scheme_validation():
    grid = LatticeGrid.rest_frame(2.0, 1.0, 256)
    with pytest.raises(ValueError):
        evolve(grid, 2.0, 1.0, 1.0, scheme="rk4")


# ------------------------------------------------------------------ spectra


@pytest.mark.parametrize("lam,mu,expected", [(2.0, 1.0, 1.1981), (2.0, 2.0, 2.3963)])
def test_mass_gap_measurement(lam, mu, expected):
    grid = LatticeGrid.rest_frame(lam, mu, 256)
    res = evolve(grid, lam, mu, 34 * _period(lam, mu))
    w = measure_mass_gap(res.series)
    assert abs(w - expected) < 1e-3 * expected
    assert abs(w / mass_n(0, lam, mu) - 1) < 1e-3


def test_odd_harmonics_only():
    grid = LatticeGrid.rest_frame(2.0, 1.0, 256)
    an = analyse_spectrum(evolve(grid, 2.0, 1.0, 34 * _period(2.0, 1.0)).series)
    assert an.even_power_ratio < 1e-6
    assert an.harmonics[2] < 1.0
    assert_allclose(an.harmonics[2], line_factor(1) / line_factor(0), rtol=1e-3)
    assert abs(an.frequencies[2] / mass_n(1, 2.0, 1.0) - 1) < 1e-3


def test_sine_calibration():
    dt = 0.05
    t = dt * np.arange(8192)
    assert abs(measure_mass_gap(TimeSeries(np.sin(t), dt)) - 1.0) < 1e-4


def test_short_series_rejected():
    dt = 0.05
    t = dt * np.arange(1024)
    with pytest.raises(SeriesTooShortError):
        measure_mass_gap(TimeSeries(np.sin(t), dt))
    with pytest.raises(SeriesTooShortError):
        measure_mass_gap(TimeSeries(np.sin(t[:10]), dt))
