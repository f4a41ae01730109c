r"""Two-point function of the massless quartic scalar: spectrum, weights, kernels.

The propagator is a sum of free poles

.. math::

    G_2(p) = \sum_{n\ge 0} \frac{B_n}{p^2 - m_n^2 + i\epsilon},\qquad
    m_n = (2n+1)\frac{\pi}{2K(-1)}\left(\frac{\lambda}{2}\right)^{1/4}\mu,

with ``B_n = pi**3 / (4 K(-1)**3) * b_n * (2n+1)**2`` and
``b_n = exp(-(n + 1/2) pi) / (1 + exp(-(2n+1) pi))``.  The weights sum to one.

The constant ``kappa0`` used in the regularized coincident-point value is
identified here as ``sum (2n+1)**4 b_n``; this reproduces 1.215018785.
"""
from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field

import numpy as np

from .elliptic import WAVE_PARAMETER, complete_K, jacobi, phase_root
from .numerics import derivative_jump, ordered_sum, second_derivative, value_jump

__all__ = [
    "NearPoleWarning",
    "UnphysicalMassWarning",
    "SpectralLine",
    "SpectralSum",
    "RegularizationResult",
    "GreensJumpResult",
    "line_factor",
    "weight_prefactor",
    "mass_n",
    "weight_n",
    "weight_bound",
    "spectrum",
    "propagator_momentum",
    "propagator_tail_bound",
    "kernel_frequency",
    "kernel_period",
    "position_kernel_rest_frame",
    "greens_jump_check",
    "kappa0",
    "kappa0_tail_bound",
    "dimreg_I2",
    "mass_correction",
    "mass_correction_coefficients",
]

DEFAULT_NMAX = 20
_BRANCHES = ("retarded", "advanced", "two-sided")


class NearPoleWarning(UserWarning):
    """``p**2`` lies within ``epsilon`` of a mass pole."""


class UnphysicalMassWarning(UserWarning):
    """A mass correction ``m**2`` came out negative."""


def _check_n(n) -> int:
    if int(n) != n or n < 0:
        raise ValueError(f"level index must be a non-negative integer, got {n!r}")
    return int(n)


def line_factor(n: int) -> float:
    """``b_n = exp(-(n + 1/2) pi) / (1 + exp(-(2n + 1) pi))``."""
    n = _check_n(n)
    return math.exp(-(n + 0.5) * math.pi) / (1.0 + math.exp(-(2 * n + 1) * math.pi))


def weight_prefactor() -> float:
    """``pi**3 / (4 K(-1)**3)``, about 3.43968."""
    return math.pi**3 / (4.0 * complete_K(WAVE_PARAMETER) ** 3)


def mass_n(n: int, lam: float, mu: float) -> float:
    """Mass of level ``n``; ``m_n / m_0 = 2n + 1`` exactly."""
    n = _check_n(n)
    if not (lam > 0 and mu > 0):
        raise ValueError(f"lam and mu must be positive, got lam={lam!r}, mu={mu!r}")
    m0 = math.pi / (2.0 * complete_K(WAVE_PARAMETER)) * (lam / 2.0) ** 0.25 * mu
    return (2 * n + 1) * m0


def weight_n(n: int) -> float:
    """Spectral weight ``B_n``; independent of the coupling and scale."""
    n = _check_n(n)
    return weight_prefactor() * line_factor(n) * (2 * n + 1) ** 2


def weight_bound(n: int) -> float:
    """Upper bound ``3.44 (2n+1)**2 exp(-(2n+1) pi / 2)`` on ``B_n``."""
    n = _check_n(n)
    return 3.44 * (2 * n + 1) ** 2 * math.exp(-(2 * n + 1) * math.pi / 2.0)


def _tail_weight(n_max: int) -> float:
    # terms fall by e^{-pi} per level; 200 more levels are far past underflow
    return ordered_sum(weight_bound(n) for n in range(n_max + 1, n_max + 200))


@dataclass(frozen=True)
class SpectralLine:
    n: int
    mass: float
    weight: float


@dataclass(frozen=True)
class SpectralSum:
    """Truncated spectrum ``n = 0 .. n_max`` with a bound on the omitted weight."""

    lines: tuple
    n_max: int
    tail_bound: float

    @property
    def total_weight(self) -> float:
        return ordered_sum(line.weight for line in self.lines)

    @property
    def masses(self) -> np.ndarray:
        return np.array([line.mass for line in self.lines])

    @property
    def weights(self) -> np.ndarray:
        return np.array([line.weight for line in self.lines])


def spectrum(lam: float, mu: float, n_max: int = DEFAULT_NMAX) -> SpectralSum:
    n_max = _check_n(n_max)
    lines = tuple(SpectralLine(n, mass_n(n, lam, mu), weight_n(n)) for n in range(n_max + 1))
    return SpectralSum(lines, n_max, _tail_weight(n_max))


def propagator_tail_bound(p2: float, lam: float, mu: float, n_max: int = DEFAULT_NMAX,
                          epsilon: float = 1e-10) -> float:
    """Bound on ``|sum_{n > n_max} B_n / (p**2 - m_n**2 + i eps)|``."""
    m_next = mass_n(n_max + 1, lam, mu) ** 2
    gap = m_next - p2 if p2 < m_next else 0.0
    return _tail_weight(n_max) / max(gap, epsilon)


def propagator_momentum(p2: float, lam: float, mu: float, epsilon: float = 1e-10,
                        n_max: int = DEFAULT_NMAX) -> complex:
    """Truncated pole sum ``sum_n B_n / (p**2 - m_n**2 + i eps)``.

    Emits :class:`NearPoleWarning` (and still returns the value) when
    ``p**2`` is within ``epsilon`` of some ``m_n**2``.  Use
    :func:`propagator_tail_bound` for the truncation error.
    """
    if n_max < 1:
        raise ValueError(f"n_max must be at least 1, got {n_max!r}")
    if not epsilon > 0:
        raise ValueError(f"epsilon must be positive, got {epsilon!r}")
    spec = spectrum(lam, mu, n_max)
    msq = spec.masses**2
    if np.any(np.abs(p2 - msq) <= epsilon):
        n = int(np.argmin(np.abs(p2 - msq)))
        warnings.warn(f"p^2={p2!r} is within epsilon of the pole m_{n}^2={msq[n]!r}",
                      NearPoleWarning, stacklevel=2)
    terms = spec.weights / (p2 - msq + 1j * epsilon)
    return complex(ordered_sum(terms.real), ordered_sum(terms.imag))


# ------------------------------------------------------------- rest-frame kernel


def kernel_frequency(lam: float, mu: float) -> float:
    """``omega = (lam/2)**(1/4) mu``, the phase velocity in time."""
    return (lam / 2.0) ** 0.25 * mu


def kernel_period(lam: float, mu: float) -> float:
    """Period ``4 K(-1) / omega`` of the kernel in ``t``."""
    return 4.0 * complete_K(WAVE_PARAMETER) / kernel_frequency(lam, mu)


def position_kernel_rest_frame(t, lam: float, mu: float, k: int = 0,
                               branch: str = "retarded", phase: float | None = None):
    """Rest-frame two-point kernel with the spatial delta factored out.

    ``-1/((8 lam)**(1/4) mu) * cn dn(omega t + chi_k, -1)`` supported on
    ``t > 0``.  ``branch="advanced"`` is the mirror ``G(-t)`` supported on
    ``t < 0``; ``"two-sided"`` drops the step function altogether and is
    only meant as a negative control.  ``phase`` overrides ``chi_k``.
    """
    if branch not in _BRANCHES:
        raise ValueError(f"branch must be one of {_BRANCHES}, got {branch!r}")
    chi = phase_root(k) if phase is None else float(phase)
    omega = kernel_frequency(lam, mu)
    pref = -1.0 / ((8.0 * lam) ** 0.25 * mu)
    t = np.asarray(t, dtype=float)
    tt = -t if branch == "advanced" else t
    e = jacobi(omega * tt + chi, WAVE_PARAMETER)
    val = np.asarray(pref * e.cn * e.dn)
    if branch != "two-sided":
        val = np.where(tt > 0, val, 0.0)
    return float(val) if val.ndim == 0 else val


@dataclass(frozen=True)
class GreensJumpResult:
    jump: float
    value_jump: float
    ode_residual: float
    tolerance: float = 1e-8

    @property
    def jump_error(self) -> float:
        return abs(self.jump - 1.0)

    @property
    def passed(self) -> bool:
        return (self.jump_error < self.tolerance and abs(self.value_jump) < self.tolerance
                and self.ode_residual < self.tolerance)


def greens_jump_check(lam: float, mu: float, k: int = 0, branch: str = "retarded",
                      phase: float | None = None, n_periods: int = 2,
                      h: float | None = None, n_points: int = 400) -> GreensJumpResult:
    """Numerical witness that the kernel is a unit-source Green's function.

    Returns the derivative jump at ``t = 0`` (should be 1), the value jump
    (should be 0) and the max residual of ``G'' + 3 lam G1(t)**2 G`` on the
    support, away from ``t = 0``.  Finite-difference steps are powers of two
    fixed in the phase ``omega t``; ``h`` overrides the one-sided step.
    """
    chi = phase_root(k) if phase is None else float(phase)
    omega = kernel_frequency(lam, mu)
    amp = mu * (2.0 / lam) ** 0.25

    def G(t):
        return position_kernel_rest_frame(t, lam, mu, k, branch, phase)

    # same resolution in the phase omega*t for every omega
    step = 2.0 ** round(math.log2(2.0**-9 / omega))
    jump = derivative_jump(G, 0.0, 0.5 * step if h is None else h)
    vjump = value_jump(G, 0.0)
    t = np.linspace(4 * step, n_periods * kernel_period(lam, mu), n_points)
    if branch == "advanced":
        t = -t
        background = amp * jacobi(-omega * t + chi, WAVE_PARAMETER).sn
    else:
        background = amp * jacobi(omega * t + chi, WAVE_PARAMETER).sn
    r = second_derivative(G, t, step) + 3.0 * lam * background**2 * G(t)
    return GreensJumpResult(float(jump), float(vjump), float(np.max(np.abs(r))))


# -------------------------------------------------------------- regularization


def kappa0_tail_bound(n_max: int) -> float:
    """Bound on ``sum_{n > n_max} (2n+1)**4 exp(-(n + 1/2) pi)``."""
    return ordered_sum((2 * n + 1) ** 4 * math.exp(-(n + 0.5) * math.pi)
                       for n in range(n_max + 1, n_max + 200))


def kappa0(n_max: int = 40) -> float:
    """``sum_n (2n+1)**4 b_n`` truncated at ``n_max`` (tail below 1e-12 for ``n_max >= 12``)."""
    n_max = _check_n(n_max)
    return ordered_sum((2 * n + 1) ** 4 * line_factor(n) for n in range(n_max + 1))


@dataclass(frozen=True)
class RegularizationResult:
    """Pole and finite part of the regularized coincident-point two-point sum.

    The overall factor ``i`` is carried as ``imaginary_unit`` rather than as a
    complex number.  ``printed_pole_coefficient`` is the printed closed form
    ``kappa0 pi**3 sqrt(lam) mu**2 / (256 K**5)`` for comparison.
    """

    pole_coefficient: float
    finite_part: float
    scale_muR: float
    printed_pole_coefficient: float
    imaginary_unit: bool = True
    n_max: int = DEFAULT_NMAX
    lines: tuple = field(default=(), repr=False)

    @property
    def ratio_to_printed(self) -> float:
        return self.pole_coefficient / self.printed_pole_coefficient


def dimreg_I2(lam: float, mu: float, scale_muR: float = 1.0,
              n_max: int = DEFAULT_NMAX) -> RegularizationResult:
    """Pole/finite split of ``sum_n B_n i m_n**2/(4 pi)**2 (1/eps - gamma - ln(m_n**2 / 4 pi muR**2))``.

    Under ``muR -> s muR`` the finite part moves by ``+pole * ln(s**2)``.
    """
    if not scale_muR > 0:
        raise ValueError(f"scale_muR must be positive, got {scale_muR!r}")
    spec = spectrum(lam, mu, n_max)
    c = spec.weights * spec.masses**2 / (16.0 * math.pi**2)
    logs = -np.euler_gamma - np.log(spec.masses**2 / (4.0 * math.pi * scale_muR**2))
    K = complete_K(WAVE_PARAMETER)
    printed = kappa0() * math.pi**3 * math.sqrt(lam) * mu * mu / (256.0 * K**5)
    return RegularizationResult(ordered_sum(c), ordered_sum(c * logs), float(scale_muR),
                                printed, True, n_max, spec.lines)


def mass_correction_coefficients(lam: float = 2.0, mu: float = 1.0):
    """Coefficient of ``m**2 eps / (lam**(3/2) mu**2)`` from ``m**2 = 3 lam G2(0)``.

    Returns ``(direct, printed)``: the value implied by the resummed pole
    coefficient and the printed ``3 pi**3 kappa0 / (256 K**5)``.  Their ratio
    is ``1/sqrt(2)``.
    """
    r = dimreg_I2(lam, mu)
    direct = 3.0 * lam * r.pole_coefficient / (lam**1.5 * mu * mu)
    printed = 3.0 * math.pi**3 * kappa0() / (256.0 * complete_K(WAVE_PARAMETER) ** 5)
    return direct, printed


def mass_correction(lam: float, G2_at_0: float) -> float:
    """``m**2 = 3 lam G2(0)``; warns with :class:`UnphysicalMassWarning` if negative."""
    m2 = 3.0 * lam * G2_at_0
    if m2 < 0:
        warnings.warn(f"mass correction m^2={m2!r} is negative", UnphysicalMassWarning,
                      stacklevel=2)
    return m2
