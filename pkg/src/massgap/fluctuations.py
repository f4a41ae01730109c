"""Fluctuations about the scalar wave: Lame operator, zero mode, stability.

The linearised operator about ``G1`` acts on functions of the wave phase as

    L[w] = p**2 w'' + m2 w + 3 lam G1(zeta)**2 w.

With ``m2 = 0`` the background is ``A sn(zeta, -1)`` and ``L`` becomes a
Lame operator with ``n = 2``, whose classical eigenfunctions are ``cn dn``
(eigenvalue 0, the translation zero mode) and ``sn cn`` (eigenvalue
``-3 p**2``).
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .elliptic import WAVE_PARAMETER, complete_K, jacobi
from .numerics import DEFAULT_STEP, first_derivative, second_derivative
from .solutions import FourMomentum, ScalarWaveSolution, dispersion_p2

__all__ = [
    "LameOperator",
    "StabilityResult",
    "zero_mode",
    "second_solution",
    "wronskian",
    "stability_eigencheck",
    "free_field_eigencheck",
]


@dataclass(frozen=True)
class LameOperator:
    """``p**2 d^2/dzeta^2 + m2 + 3 lam G1**2`` about a given background."""

    background: ScalarWaveSolution

    def potential(self, zeta):
        g1 = self.background.value(zeta)
        return self.background.msq + 3.0 * self.background.lam * g1 * g1

    def apply(self, f, zeta, h: float = DEFAULT_STEP):
        zeta = np.asarray(zeta, dtype=float)
        return self.background.p2 * second_derivative(f, zeta, h) + self.potential(zeta) * f(zeta)

    def residual(self, f, zeta, h: float = DEFAULT_STEP) -> float:
        return float(np.max(np.abs(self.apply(f, zeta, h))))


def zero_mode(sol: ScalarWaveSolution, zeta):
    """Translation zero mode ``w1 = dG1/dzeta = A cn dn``."""
    return sol.derivative(zeta)


def second_solution(sol: ScalarWaveSolution, zeta, literal: bool = False):
    """Second independent solution of ``L[w] = 0`` (massless background).

    Returns ``(zeta w1 + G1) / 2``, i.e. ``mu dG1/dmu / 2`` up to a multiple of
    the zero mode, which is annihilated by ``L``.  ``literal=True`` returns the
    combination ``zeta w1 / 4 + G1 / 2`` instead; that one is *not* a solution:
    ``L`` maps it to ``lam G1**3 / 2``.
    """
    zeta = np.asarray(zeta, dtype=float) if np.ndim(zeta) else float(zeta)
    a = 0.25 if literal else 0.5
    return a * zeta * sol.derivative(zeta) + 0.5 * sol.value(zeta)


def wronskian(sol: ScalarWaveSolution, zeta, h: float = DEFAULT_STEP, literal: bool = False):
    """``w1 w2' - w2 w1'`` with derivatives from the 4th-order stencil."""
    def w1(z):
        return zero_mode(sol, z)

    def w2(z):
        return second_solution(sol, z, literal)

    zeta = np.asarray(zeta, dtype=float)
    return w1(zeta) * first_derivative(w2, zeta, h) - w2(zeta) * first_derivative(w1, zeta, h)


@dataclass(frozen=True)
class StabilityResult:
    eigenvalue: float
    expected: float
    residual: float
    onshell: bool
    tolerance: float

    @property
    def passed(self) -> bool:
        return self.onshell and self.residual <= self.tolerance and self.eigenvalue <= 0


def stability_eigencheck(lam: float, mu: float, zeta=None, p2: float | None = None,
                         h: float = DEFAULT_STEP, tol: float = 1e-8) -> StabilityResult:
    """Check that ``sn cn`` is an eigenfunction with eigenvalue ``-3 mu**2 sqrt(lam/2)``.

    Parameters
    ----------
    lam, mu : float
        Coupling and scale of the massless background ``mu (2/lam)**(1/4) sn``.
    zeta : array_like, optional
        Phase grid; defaults to 200 points over two periods.
    p2 : float, optional
        Four-momentum squared of the background.  Defaults to the on-shell
        value; any other value makes the check fail.
    """
    on = dispersion_p2(lam, mu)
    p2 = on if p2 is None else float(p2)
    if zeta is None:
        zeta = np.linspace(0.0, 8.0 * complete_K(WAVE_PARAMETER), 200)
    zeta = np.asarray(zeta, dtype=float)
    amp = mu * (2.0 / lam) ** 0.25

    def f(z):
        e = jacobi(z, WAVE_PARAMETER)
        return e.sn * e.cn

    fz = f(zeta)
    Lf = p2 * second_derivative(f, zeta, h) + 3.0 * lam * (amp * jacobi(zeta, WAVE_PARAMETER).sn) ** 2 * fz
    expected = -3.0 * mu * mu * math.sqrt(lam / 2.0)
    eigenvalue = float(np.dot(fz, Lf) / np.dot(fz, fz))
    residual = float(np.max(np.abs(Lf - expected * fz)))
    onshell = abs(p2 - on) <= 1e-12 * max(1.0, on)
    return StabilityResult(eigenvalue, expected, residual, onshell, tol)


def free_field_eigencheck(p, mass: float) -> float:
    """Eigenvalue ``-(p**2 - m**2)`` of ``d'Alembertian + m**2`` on a plane wave.

    ``p`` is a :class:`FourMomentum` or the scalar ``p**2``.  Non-positive
    values sit on or above the mass shell; a positive result signals a
    momentum below the spectrum bound ``p**2 = m**2``.
    """
    p2 = p.square if isinstance(p, FourMomentum) else float(p)
    return -(p2 - mass * mass)
