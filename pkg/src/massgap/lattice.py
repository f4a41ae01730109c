"""Classical evolution of the massless quartic field from exact initial data.

Two settings are supported:

* ``dim=0``: the rest-frame ODE ``phi'' + lam phi**3 = 0`` started from
  ``A sn(chi, -1)``;
* ``dim=1``: the 1+1D equation ``phi_tt - phi_xx + lam phi**3 = 0`` on a
  periodic box holding an integer number of wavelengths of the travelling
  wave ``A sn(p0 t - p1 x + chi, -1)``.  ``phi_xx`` is taken spectrally.

Time stepping is velocity Verlet (symplectic, 2nd order).  A 4th-order
Yoshida composition of the same step is available for tighter trajectory
error at a fixed step.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .elliptic import WAVE_PARAMETER, complete_K, jacobi
from .solutions import dispersion_p2

__all__ = [
    "CFLError",
    "BlowUpError",
    "SeriesTooShortError",
    "LatticeGrid",
    "State",
    "TimeSeries",
    "EvolutionResult",
    "SpectrumAnalysis",
    "exact_field",
    "initial_state",
    "energy",
    "evolve",
    "convergence_study",
    "analyse_spectrum",
    "measure_mass_gap",
    "phase_velocity",
]

SCHEMES = ("verlet", "yoshida4")
_CBRT2 = 2.0 ** (1.0 / 3.0)
_YOSHIDA = (1.0 / (2.0 - _CBRT2), -_CBRT2 / (2.0 - _CBRT2), 1.0 / (2.0 - _CBRT2))


class CFLError(ValueError):
    """Time step violates ``dt < 0.5 * spacing``."""


class BlowUpError(RuntimeError):
    """The field grew beyond ``1e3`` times its initial amplitude."""


class SeriesTooShortError(ValueError):
    """A time series spans fewer periods than the spectrum estimate needs."""


@dataclass(frozen=True)
class LatticeGrid:
    """Discretisation: ``dim`` 0 (single site) or 1 (periodic line).

    ``p1`` is the spatial wave momentum of the travelling wave in ``dim=1``;
    the box ``n_sites * spacing`` must hold a whole number of wavelengths.
    """

    dim: int
    n_sites: int
    spacing: float
    dt: float
    p1: float = 0.0
    boundary: str = "periodic"

    def __post_init__(self):
        if self.dim not in (0, 1):
            raise ValueError(f"dim must be 0 or 1, got {self.dim!r}")
        if self.boundary != "periodic":
            raise ValueError("only periodic boundaries are supported")
        if not self.dt > 0:
            raise ValueError(f"dt must be positive, got {self.dt!r}")
        if self.dim == 1:
            if self.dt >= 0.5 * self.spacing:
                raise CFLError(f"dt={self.dt!r} violates dt < 0.5*spacing={0.5 * self.spacing!r}")
            if not self.p1 > 0:
                raise ValueError("a dim=1 grid needs a positive wave momentum p1")
            waves = self.length * self.p1 / (4.0 * complete_K(WAVE_PARAMETER))
            if abs(waves - round(waves)) > 1e-9 * max(1.0, waves) or round(waves) < 1:
                raise ValueError(f"box holds {waves!r} wavelengths; need an integer")

    @property
    def length(self) -> float:
        return self.n_sites * self.spacing

    @property
    def x(self) -> np.ndarray:
        return np.arange(self.n_sites) * self.spacing

    @classmethod
    def rest_frame(cls, lam: float, mu: float, steps_per_period: int = 4096) -> "LatticeGrid":
        T = 4.0 * complete_K(WAVE_PARAMETER) / math.sqrt(dispersion_p2(lam, mu))
        return cls(0, 1, 1.0, T / steps_per_period)

    @classmethod
    def travelling(cls, p1: float = 1.0, sites_per_wavelength: int = 512,
                   wavelengths: int = 1, dt_frac: float = 0.25) -> "LatticeGrid":
        wavelength = 4.0 * complete_K(WAVE_PARAMETER) / p1
        spacing = wavelength / sites_per_wavelength
        return cls(1, sites_per_wavelength * wavelengths, spacing, dt_frac * spacing, p1)


@dataclass
class State:
    phi: np.ndarray
    pi: np.ndarray
    t: float = 0.0


@dataclass(frozen=True)
class TimeSeries:
    """Uniformly sampled ``phi`` at the probe site."""

    values: np.ndarray
    sample_dt: float
    t0: float = 0.0

    @property
    def times(self) -> np.ndarray:
        return self.t0 + self.sample_dt * np.arange(len(self.values))

    @property
    def span(self) -> float:
        return self.sample_dt * len(self.values)


@dataclass
class EvolutionResult:
    state: State
    series: TimeSeries
    energy_drift: float
    final_error: float
    steps: int
    dt: float
    scheme: str
    mode_series: np.ndarray | None = field(default=None, repr=False)


def _wave(lam: float, mu: float, p1: float):
    p2 = dispersion_p2(lam, mu)
    return mu * (2.0 / lam) ** 0.25, math.sqrt(p2 + p1 * p1)


def exact_field(grid: LatticeGrid, lam: float, mu: float, t: float, chi: float = 0.0):
    """The elliptic solution sampled on the grid: ``(phi, phi_t)``."""
    amp, p0 = _wave(lam, mu, grid.p1)
    zeta = p0 * t - grid.p1 * grid.x + chi if grid.dim == 1 else np.array([p0 * t + chi])
    e = jacobi(zeta, WAVE_PARAMETER)
    return amp * e.sn, amp * p0 * e.cn * e.dn


def initial_state(grid: LatticeGrid, lam: float, mu: float, chi: float = 0.0) -> State:
    phi, pi = exact_field(grid, lam, mu, 0.0, chi)
    return State(np.array(phi, dtype=float), np.array(pi, dtype=float))


def _wavenumbers(grid: LatticeGrid) -> np.ndarray:
    return 2.0 * np.pi * np.fft.rfftfreq(grid.n_sites, d=grid.spacing)


def _phi_x(grid: LatticeGrid, phi: np.ndarray) -> np.ndarray:
    return np.fft.irfft(1j * _wavenumbers(grid) * np.fft.rfft(phi), n=grid.n_sites)


def energy(state: State, lam: float, grid: LatticeGrid | None = None) -> float:
    """``sum [pi**2/2 + phi_x**2/2 + lam phi**4/4] dx`` (just the density for ``dim=0``)."""
    phi, pi = np.asarray(state.phi), np.asarray(state.pi)
    dens = 0.5 * pi * pi + 0.25 * lam * phi**4
    if grid is None or grid.dim == 0:
        return float(np.sum(dens))
    dens = dens + 0.5 * _phi_x(grid, phi) ** 2
    return float(math.fsum(dens) * grid.spacing)


def _force(grid: LatticeGrid, lam: float):
    if grid.dim == 0:
        return lambda phi: -lam * phi**3
    k2 = _wavenumbers(grid) ** 2
    n = grid.n_sites

    def f(phi):
        lap = np.fft.irfft(-k2 * np.fft.rfft(phi), n=n)
        return lap - lam * phi**3

    return f


def evolve(grid: LatticeGrid, lam: float, mu: float, t_final: float, chi: float = 0.0,
           scheme: str = "verlet", state: State | None = None, sample_every: int = 1,
           probe: int = 0) -> EvolutionResult:
    """Integrate from the exact wave (or ``state``) up to ``t_final``.

    The number of steps is ``ceil(t_final / grid.dt)`` with the step shrunk
    to land exactly on ``t_final``.  ``energy_drift`` is the largest relative
    deviation of the energy from its initial value over the run (absolute if
    the initial energy is zero); ``final_error`` is the L-infinity distance to
    the exact solution at ``t_final``.

    Raises
    ------
    BlowUpError
        If ``|phi|`` exceeds ``1e3`` times the initial amplitude (estimated
        from the energy when the initial field is small).
    """
    if scheme not in SCHEMES:
        raise ValueError(f"scheme must be one of {SCHEMES}, got {scheme!r}")
    if not t_final > 0:
        raise ValueError(f"t_final must be positive, got {t_final!r}")
    steps = int(math.ceil(t_final / grid.dt - 1e-9))
    dt = t_final / steps
    st = initial_state(grid, lam, mu, chi) if state is None else State(
        np.array(state.phi, dtype=float), np.array(state.pi, dtype=float), state.t)
    force = _force(grid, lam)
    subs = (1.0,) if scheme == "verlet" else _YOSHIDA
    e0 = energy(st, lam, grid)
    # amplitude from the data or, when phi starts at a node, from the energy
    amp0 = max(float(np.max(np.abs(st.phi))), abs(4.0 * e0 / (lam * max(grid.length, 1.0))) ** 0.25)
    limit = 1e3 * max(amp0, 1e-300)
    phi, pi = st.phi, st.pi
    if grid.dim == 0:
        phi, pi = float(phi[0]), float(pi[0])
    samples = [phi if grid.dim == 0 else phi[probe]]
    modes = [np.fft.rfft(phi)] if grid.dim == 1 else None
    mode_index = int(round(grid.length * grid.p1 / (4.0 * complete_K(WAVE_PARAMETER))))
    worst = 0.0
    f = force(phi)
    for step in range(1, steps + 1):
        for w in subs:
            h = w * dt
            pi = pi + 0.5 * h * f
            phi = phi + h * pi
            f = force(phi)
            pi = pi + 0.5 * h * f
        if step % sample_every == 0:
            samples.append(phi if grid.dim == 0 else phi[probe])
            if grid.dim == 0:
                e = 0.5 * pi * pi + 0.25 * lam * phi**4
            else:
                e = energy(State(phi, pi), lam, grid)
            worst = max(worst, abs(e - e0))
            if grid.dim == 1:
                modes.append(np.fft.rfft(phi))
            if not (abs(phi) <= limit if grid.dim == 0 else np.all(np.abs(phi) <= limit)):
                raise BlowUpError(f"|phi| exceeded {limit!r} at step {step} (t={step * dt!r})")
    final = State(np.atleast_1d(np.asarray(phi, dtype=float)),
                  np.atleast_1d(np.asarray(pi, dtype=float)), st.t + t_final)
    err = float("nan")
    if state is None:
        exact, _ = exact_field(grid, lam, mu, final.t, chi)
        err = float(np.max(np.abs(final.phi - exact)))
    drift = worst / abs(e0) if e0 != 0 else worst
    series = TimeSeries(np.array(samples, dtype=float), dt * sample_every, st.t)
    mode_series = None
    if grid.dim == 1:
        mode_series = np.array([m[mode_index] for m in modes])
    return EvolutionResult(final, series, float(drift), err, steps, dt, scheme, mode_series)


def convergence_study(lam: float, mu: float, periods: float = 10.0,
                      steps_per_period=(256, 512, 1024, 2048), scheme: str = "verlet"):
    """Final-time errors of rest-frame runs and the observed orders between refinements."""
    T = LatticeGrid.rest_frame(lam, mu, 1).dt
    errors = []
    for n in steps_per_period:
        grid = LatticeGrid(0, 1, 1.0, T / n)
        errors.append(evolve(grid, lam, mu, periods * T, scheme=scheme, sample_every=n).final_error)
    errors = np.array(errors)
    ratios = np.asarray(steps_per_period[1:], float) / np.asarray(steps_per_period[:-1], float)
    orders = np.log(errors[:-1] / errors[1:]) / np.log(ratios)
    return errors, orders


# ------------------------------------------------------------------ spectra


@dataclass(frozen=True)
class SpectrumAnalysis:
    """Windowed-FFT summary of a series.

    ``harmonics[j]`` is the interpolated amplitude near ``(j + 1) * fundamental``
    relative to the fundamental's, for ``j = 0 .. 4``, and ``frequencies[j]``
    the refined location of that peak.
    """

    fundamental: float
    harmonics: tuple
    periods: float
    frequencies: tuple = ()

    @property
    def even_power_ratio(self) -> float:
        """Largest power at ``2 w`` or ``4 w`` relative to the fundamental."""
        return max(self.harmonics[1] ** 2, self.harmonics[3] ** 2)

    @property
    def third_ratio(self) -> float:
        return self.harmonics[2]


def _spectrum(values: np.ndarray, dt: float, pad: int):
    n = 1 << int(math.floor(math.log2(len(values))))
    v = np.asarray(values[:n], dtype=float)
    v = v - v.mean()
    win = np.hanning(n)
    spec = np.abs(np.fft.rfft(v * win, n=pad * n))
    omega = 2.0 * np.pi * np.fft.rfftfreq(pad * n, d=dt)
    return omega, spec, n


def _refine(omega: np.ndarray, spec: np.ndarray, i: int):
    """Log-parabolic interpolation around bin ``i``: ``(omega, amplitude)``."""
    i = min(max(i, 1), len(spec) - 2)
    a, b, c = np.log(spec[i - 1:i + 2] + 1e-300)
    denom = a - 2.0 * b + c
    d = 0.5 * (a - c) / denom if denom != 0 else 0.0
    step = omega[1] - omega[0]
    return omega[i] + d * step, float(np.exp(b - 0.25 * (a - c) * d))


def analyse_spectrum(series: TimeSeries, min_periods: float = 32.0, pad: int = 8) -> SpectrumAnalysis:
    """Hann-windowed, zero-padded FFT with log-parabolic peak refinement.

    Only the leading power-of-two block of samples is used.

    Raises
    ------
    SeriesTooShortError
        If fewer than 64 samples are given or the series covers fewer than
        ``min_periods`` periods of the detected fundamental.
    """
    if len(series.values) < 64:
        raise SeriesTooShortError(f"need at least 64 samples, got {len(series.values)}")
    omega, spec, n = _spectrum(series.values, series.sample_dt, pad)
    i0 = int(np.argmax(spec[1:])) + 1
    w0, a0 = _refine(omega, spec, i0)
    periods = n * series.sample_dt * w0 / (2.0 * math.pi)
    if periods < min_periods:
        raise SeriesTooShortError(
            f"series covers {periods:.2f} periods of the fundamental; need {min_periods}"
        )
    step = omega[1] - omega[0]
    amps = [1.0]
    freqs = [float(w0)]
    for j in range(2, 6):
        target = j * w0
        if target >= omega[-2] - 2 * pad * step:
            amps.append(0.0)
            freqs.append(math.nan)
            continue
        # search within a few zero-padded bins of the expected line
        lo = int(target / step) - 2 * pad
        hi = int(target / step) + 2 * pad + 1
        k = lo + int(np.argmax(spec[lo:hi]))
        wk, ak = _refine(omega, spec, k)
        amps.append(ak / a0)
        freqs.append(float(wk))
    return SpectrumAnalysis(float(w0), tuple(amps), float(periods), tuple(freqs))


def measure_mass_gap(series: TimeSeries, min_periods: float = 32.0) -> float:
    """Dominant angular frequency of a rest-frame oscillation (``m_0``)."""
    return analyse_spectrum(series, min_periods).fundamental


def phase_velocity(result: EvolutionResult, grid: LatticeGrid) -> float:
    """``omega / k`` of the fundamental spatial mode from its unwrapped phase."""
    if result.mode_series is None:
        raise ValueError("phase velocity needs a dim=1 run")
    phase = np.unwrap(np.angle(result.mode_series))
    t = result.series.times
    slope = np.polyfit(t, phase, 1)[0]
    k = grid.p1 * math.pi / (2.0 * complete_K(WAVE_PARAMETER))
    return abs(slope) / k
