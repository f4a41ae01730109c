r"""Exact classical waves.

Scalar theory
    :math:`\partial^2\phi + m^2\phi + \lambda\phi^3 = 0` is solved by
    ``A sn(zeta, kappa)`` with ``zeta = p.x + chi``,

    * ``A**2 = 2 mu**4 / (m2 + s)``,
    * ``kappa = (-m2 + s) / (-m2 - s)``,
    * ``p**2 = m2 + lam mu**4 / (m2 + s)``,

    where ``s = sqrt(m2**2 + 2 lam mu**4)``.  At ``m2 = 0`` this is
    ``mu (2/lam)**(1/4) sn(zeta, -1)`` with ``p**2 = mu**2 sqrt(lam/2)``.

SU(2) Yang-Mills
    Diagonal ansatz ``A^1_1 = X sn, A^2_2 = Y sn, A^3_3 = Z sn`` (all with
    parameter -1) and ``p**2 = mu**2 g``.  The amplitudes solve a linear
    system in ``X**2, Y**2, Z**2``.

Metric signature is (+, -, -, -); ``zeta = p0 t - p.x + chi``.  Every
residual is taken along the single wave coordinate ``zeta``, where the
d'Alembertian acting on ``f(zeta)`` is ``p**2 f''``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .elliptic import WAVE_PARAMETER, complete_K, jacobi
from .numerics import DEFAULT_STEP, richardson_second_derivative, second_derivative

__all__ = [
    "DispersionError",
    "NoRealAnsatzError",
    "FourMomentum",
    "ScalarWaveSolution",
    "SU2Ansatz",
    "scalar_amplitude_modulus",
    "dispersion_p2",
    "eval_G1",
    "scalar_residual",
    "classical_residual_scalar",
    "su2_rhs",
    "su2_solve",
    "su2_system_residual",
    "classical_residual_su2",
]

_DISPERSION_TOL = 1e-12


class DispersionError(ValueError):
    """The four-momentum is not on the required mass shell."""


class NoRealAnsatzError(ValueError):
    """The algebraic amplitude system has no real (non-negative square) solution."""


def _require_positive(**kw):
    for name, v in kw.items():
        if not (v > 0 and math.isfinite(v)):
            raise ValueError(f"{name} must be positive and finite, got {v!r}")


@dataclass(frozen=True)
class FourMomentum:
    """Contravariant components ``p^mu``; signature (+, -, -, -)."""

    p0: float
    p1: float = 0.0
    p2: float = 0.0
    p3: float = 0.0

    @classmethod
    def rest(cls, p_squared: float) -> "FourMomentum":
        return cls(math.sqrt(p_squared))

    @classmethod
    def on_shell(cls, p_squared: float, p1=0.0, p2=0.0, p3=0.0) -> "FourMomentum":
        """Momentum with the given spatial part and ``p0`` fixed by ``p**2``."""
        return cls(math.sqrt(p_squared + p1 * p1 + p2 * p2 + p3 * p3), p1, p2, p3)

    @property
    def upper(self) -> np.ndarray:
        return np.array([self.p0, self.p1, self.p2, self.p3])

    @property
    def lower(self) -> np.ndarray:
        return np.array([self.p0, -self.p1, -self.p2, -self.p3])

    @property
    def square(self) -> float:
        return self.p0 * self.p0 - self.p1 * self.p1 - self.p2 * self.p2 - self.p3 * self.p3

    def spatial(self, i: int) -> float:
        return (self.p1, self.p2, self.p3)[i - 1]

    def dot(self, x) -> np.ndarray:
        """``p.x`` for spacetime points ``x`` of shape ``(..., 4)``."""
        return np.asarray(x, dtype=float) @ self.lower


def scalar_amplitude_modulus(lam: float, mu: float, msq: float = 0.0):
    """Amplitude and elliptic parameter of the scalar wave.

    Returns
    -------
    amplitude : float
    kappa : float
        Parameter in ``[-1, 0)``; exactly -1 at ``msq = 0``.
    """
    _require_positive(lam=lam, mu=mu)
    if not (msq >= 0 and math.isfinite(msq)):
        raise ValueError(f"msq must be non-negative, got {msq!r}")
    s = math.sqrt(msq * msq + 2.0 * lam * mu**4)
    amplitude = math.sqrt(2.0 * mu**4 / (msq + s))
    kappa = -1.0 if msq == 0 else (-msq + s) / (-msq - s)
    return amplitude, kappa


def dispersion_p2(lam: float, mu: float, msq: float = 0.0) -> float:
    """Right-hand side of the dispersion relation, ``p**2``."""
    _require_positive(lam=lam, mu=mu)
    if msq == 0:
        return mu * mu * math.sqrt(lam / 2.0)
    s = math.sqrt(msq * msq + 2.0 * lam * mu**4)
    return msq + lam * mu**4 / (msq + s)


@dataclass(frozen=True)
class ScalarWaveSolution:
    """One member of the exact scalar wave family.

    ``p`` defaults to the rest frame, ``(sqrt(p**2), 0, 0, 0)``.  A supplied
    momentum must satisfy the dispersion relation to 1e-12 (relative).
    """

    lam: float
    mu: float
    msq: float = 0.0
    chi: float = 0.0
    p: FourMomentum | None = None
    amplitude: float = field(init=False)
    kappa: float = field(init=False)
    p2: float = field(init=False)

    def __post_init__(self):
        amp, kappa = scalar_amplitude_modulus(self.lam, self.mu, self.msq)
        p2 = dispersion_p2(self.lam, self.mu, self.msq)
        object.__setattr__(self, "amplitude", amp)
        object.__setattr__(self, "kappa", kappa)
        object.__setattr__(self, "p2", p2)
        if self.p is None:
            object.__setattr__(self, "p", FourMomentum.rest(p2))
        elif abs(self.p.square - p2) > _DISPERSION_TOL * max(1.0, p2):
            raise DispersionError(
                f"p^2={self.p.square!r} violates the dispersion relation p^2={p2!r}"
            )

    @property
    def omega(self) -> float:
        """Rest-frame angular frequency of the phase, ``sqrt(p**2)``."""
        return math.sqrt(self.p2)

    @property
    def quarter_period(self) -> float:
        """``K(kappa)``, the quarter period in the wave phase."""
        return complete_K(self.kappa)

    def phase(self, x) -> np.ndarray:
        return self.p.dot(x) + self.chi

    def value(self, zeta):
        """``G1`` as a function of the wave phase."""
        return self.amplitude * jacobi(zeta, self.kappa).sn

    def derivative(self, zeta):
        """``dG1/dzeta = A cn dn``."""
        e = jacobi(zeta, self.kappa)
        return self.amplitude * e.cn * e.dn

    def __call__(self, x):
        return self.value(self.phase(x))


def eval_G1(sol: ScalarWaveSolution, x):
    """One-point function at spacetime point(s) ``x`` (shape ``(..., 4)``)."""
    return sol(x)


def scalar_residual(field, zeta, p2: float, lam: float, msq: float = 0.0,
                    h: float = DEFAULT_STEP, offset: float = 0.0, richardson: bool = False):
    """Pointwise residual of ``p2 f'' + msq f + lam f**3 + offset`` along ``zeta``."""
    zeta = np.asarray(zeta, dtype=float)
    f = field(zeta)
    d2 = richardson_second_derivative if richardson else second_derivative
    return p2 * d2(field, zeta, h) + msq * f + lam * f**3 + offset


def classical_residual_scalar(sol: ScalarWaveSolution, zeta=None, h: float = DEFAULT_STEP,
                              field=None, richardson: bool = False) -> float:
    """Max finite-difference residual of the classical equation on ``zeta``.

    The checked operator is ``p**2 d^2/dzeta^2 + m2 + lam phi**2`` applied to
    ``phi``; ``field`` overrides the solution (for negative controls) and
    ``richardson`` switches to the extrapolated ``h, 2h`` stencil pair.
    """
    if zeta is None:
        zeta = np.linspace(0.0, 4.0 * sol.quarter_period, 100)
    field = sol.value if field is None else field
    r = scalar_residual(field, zeta, sol.p2, sol.lam, sol.msq, h, richardson=richardson)
    return float(np.max(np.abs(r)))


# --------------------------------------------------------------------------- SU(2)


def su2_rhs(p: FourMomentum, alpha: float, g: float, mu: float) -> np.ndarray:
    """Right-hand sides ``r_i = (2/g**2)(1 - 1/alpha) p_i**2 + 2 mu**2 / g``."""
    c = (2.0 / (g * g)) * (1.0 - 1.0 / alpha)
    base = 2.0 * mu * mu / g
    return np.array([c * p.spatial(i) ** 2 + base for i in (1, 2, 3)])


@dataclass(frozen=True)
class SU2Ansatz:
    """Diagonal SU(2) wave ``A^i_i = amp_i sn(p.x + chi, -1)``."""

    X: float
    Y: float
    Z: float
    p: FourMomentum
    alpha: float
    g: float
    mu: float
    chi: float = 0.0

    @property
    def amplitudes(self) -> np.ndarray:
        return np.array([self.X, self.Y, self.Z])

    def component(self, i: int, zeta):
        return self.amplitudes[i - 1] * jacobi(zeta, WAVE_PARAMETER).sn


def su2_solve(p: FourMomentum, alpha: float, g: float, mu: float, chi: float = 0.0,
              tol: float = 1e-10) -> SU2Ansatz:
    """Solve the amplitude system for the diagonal ansatz.

    Raises
    ------
    DispersionError
        If ``p**2`` differs from ``mu**2 g`` by more than ``tol`` (relative).
    NoRealAnsatzError
        If any of ``X**2, Y**2, Z**2`` comes out negative.
    """
    _require_positive(alpha=alpha, g=g, mu=mu)
    target = mu * mu * g
    if abs(p.square - target) > tol * max(1.0, target):
        raise DispersionError(f"p^2={p.square!r} but the ansatz needs p^2=mu^2 g={target!r}")
    r = su2_rhs(p, alpha, g, mu)
    total = 0.5 * r.sum()
    squares = total - r
    if np.any(squares < 0):
        raise NoRealAnsatzError(
            f"no real diagonal ansatz: X^2, Y^2, Z^2 = {squares.tolist()}"
        )
    X, Y, Z = np.sqrt(squares)
    return SU2Ansatz(float(X), float(Y), float(Z), p, alpha, g, mu, chi)


def su2_system_residual(ansatz: SU2Ansatz) -> float:
    """Back-substitution error of the three algebraic equations."""
    sq = ansatz.amplitudes**2
    lhs = np.array([sq[1] + sq[2], sq[0] + sq[2], sq[0] + sq[1]])
    return float(np.max(np.abs(lhs - su2_rhs(ansatz.p, ansatz.alpha, ansatz.g, ansatz.mu))))


def classical_residual_su2(ansatz: SU2Ansatz, zeta=None, h: float = DEFAULT_STEP) -> float:
    """Max FD residual over the three diagonal component equations.

    Component ``i`` reads, along ``zeta``,
    ``(p**2 + (1 - 1/alpha) p_i**2) A_i'' + g**2 (A_j**2 + A_k**2) A_i = 0``
    with ``A_j = amp_j sn(zeta, -1)``.
    """
    if zeta is None:
        zeta = np.linspace(0.0, 4.0 * complete_K(WAVE_PARAMETER), 100)
    zeta = np.asarray(zeta, dtype=float) + ansatz.chi
    p2 = ansatz.p.square
    gauge = 1.0 - 1.0 / ansatz.alpha
    fields = {i: ansatz.component(i, zeta) for i in (1, 2, 3)}
    worst = 0.0
    for i in (1, 2, 3):
        def comp(z, i=i):
            return ansatz.component(i, z)
        others = sum(fields[j] ** 2 for j in (1, 2, 3) if j != i)
        coeff = p2 + gauge * ansatz.p.spatial(i) ** 2
        r = coeff * second_derivative(comp, zeta, h) + ansatz.g**2 * others * fields[i]
        worst = max(worst, float(np.max(np.abs(r))))
    return worst
