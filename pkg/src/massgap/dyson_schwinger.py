"""Residual checks of the Dyson-Schwinger tower on the exact solution.

All higher correlators are reduced to the rest frame, where every kernel is
a function of time only and the spatial delta factors are contracted by
hand.  Delta sources are never discretised; Green's equations are checked
through derivative jumps plus homogeneous residuals.

Convolutions are written with ``x`` as the output point and integration
time ``t1``.  With the retarded kernel ``G2(s) = 0`` for ``s <= 0`` the
integrand of ``G3(x - y, x - z)`` lives on ``max(t_y, t_z) < t1 < t_x``,
which is empty as soon as ``y`` or ``z`` coincides with ``x``.
"""
from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from typing import Callable

import numpy as np

from .elliptic import WAVE_PARAMETER, complete_K, jacobi
from .numerics import DEFAULT_STEP, composite_gauss, derivative_jump, ordered_sum
from .report import Check, ResidualReport
from .solutions import DispersionError, FourMomentum, ScalarWaveSolution, scalar_residual
from .spectral import (
    NearPoleWarning,
    greens_jump_check,
    kernel_frequency,
    kernel_period,
    mass_n,
    position_kernel_rest_frame,
)

__all__ = [
    "UnderResolvedWarning",
    "ClosureConditions",
    "TransverseProjector",
    "RestFrameKernels",
    "QuadratureSpec",
    "OriginCertificate",
    "GhostResult",
    "g1_residual",
    "g2_greens_residual",
    "g3_convolution",
    "g4_convolution",
    "g3_at_origin",
    "two_point_check",
    "ym_two_point_check",
    "ghost_check",
]

METRIC = np.diag([1.0, -1.0, -1.0, -1.0])


class UnderResolvedWarning(UserWarning):
    """Quadrature node spacing coarser than ``period / 32``."""


@dataclass(frozen=True)
class ClosureConditions:
    """Coincident-point values entering the lower equations of the tower.

    The consistent solution has every entry zero.  ``G5_zero`` and ``G6_zero``
    record the assumption on the next two levels, for which no closed form
    exists to check against.
    """

    G2_0: float = 0.0
    G3_00: float = 0.0
    G4_00x: float = 0.0
    K2_0: float = 0.0
    P2_0: float = 0.0
    G5_zero: bool = True
    G6_zero: bool = True

    @property
    def consistent(self) -> bool:
        vals = (self.G2_0, self.G3_00, self.G4_00x, self.K2_0, self.P2_0)
        return all(v == 0 for v in vals) and self.G5_zero and self.G6_zero


@dataclass(frozen=True)
class TransverseProjector:
    """``Pi_{mu nu} = g_{mu nu} - p_mu p_nu / p**2`` (both indices down)."""

    p: FourMomentum

    def __post_init__(self):
        if self.p.square == 0:
            raise ValueError("transverse projector undefined for p^2 = 0")

    @property
    def lower(self) -> np.ndarray:
        pl = self.p.lower
        return METRIC - np.outer(pl, pl) / self.p.square

    @property
    def mixed(self) -> np.ndarray:
        """``Pi_mu^nu``, the form that composes as a matrix product."""
        return self.lower @ METRIC

    def contract(self) -> np.ndarray:
        """``Pi_{mu nu} p^nu``; zero for a transverse projector."""
        return self.lower @ self.p.upper

    def idempotence_error(self) -> float:
        m = self.mixed
        return float(np.max(np.abs(m @ m - m)))


# ------------------------------------------------------------------ G1, G2


def g1_residual(sol: ScalarWaveSolution, closure: ClosureConditions = ClosureConditions(),
                grid=None, h: float = DEFAULT_STEP, field: Callable | None = None) -> float:
    """Max residual of ``p**2 G1'' + lam (G1**3 + 3 G2(0) G1 + G3(0,0))``.

    A nonzero ``closure.G2_0`` is absorbed into the mass ``m2 = 3 lam G2(0)``
    and the matching shifted solution replaces ``sol``.  ``field`` overrides
    ``G1`` as a function of the phase.
    """
    msq = 3.0 * sol.lam * closure.G2_0
    if msq != sol.msq:
        sol = ScalarWaveSolution(sol.lam, sol.mu, msq, sol.chi)
    if grid is None:
        grid = np.linspace(0.0, 4.0 * sol.quarter_period, 100)
    f = sol.value if field is None else field
    r = scalar_residual(f, grid, sol.p2, sol.lam, msq, h, offset=sol.lam * closure.G3_00)
    return float(np.max(np.abs(r)))


def g2_greens_residual(lam: float, mu: float, k: int = 0, phase: float | None = None,
                       branch: str = "retarded"):
    """``(|jump - 1|, homogeneous residual)`` of the rest-frame kernel."""
    res = greens_jump_check(lam, mu, k, branch=branch, phase=phase)
    return res.jump_error, res.ode_residual


# ------------------------------------------------------------ convolutions


@dataclass(frozen=True)
class RestFrameKernels:
    """Time-domain kernels used inside the convolutions.

    By default ``g2`` is the retarded rest-frame two-point kernel and ``g1``
    the background ``mu (2/lam)**(1/4) sn(omega t + chi1, -1)``.  Either can
    be replaced by a callable; ``retarded=False`` declares a kernel without
    the step-function support, so integrals run over a finite window.
    """

    lam: float = 2.0
    mu: float = 1.0
    k: int = 0
    chi1: float = 0.0
    g2: Callable | None = None
    g1: Callable | None = None
    retarded: bool = True

    @classmethod
    def two_sided(cls, lam: float = 2.0, mu: float = 1.0, k: int = 0) -> "RestFrameKernels":
        """Negative control: kernel with the step function removed."""
        return cls(lam, mu, k, g2=lambda t: position_kernel_rest_frame(t, lam, mu, k, "two-sided"),
                   retarded=False)

    @property
    def period(self) -> float:
        return kernel_period(self.lam, self.mu)

    def G2(self, t):
        if self.g2 is not None:
            return self.g2(t)
        return position_kernel_rest_frame(t, self.lam, self.mu, self.k)

    def G1(self, t):
        if self.g1 is not None:
            return self.g1(t)
        amp = self.mu * (2.0 / self.lam) ** 0.25
        omega = kernel_frequency(self.lam, self.mu)
        return amp * jacobi(omega * np.asarray(t, dtype=float) + self.chi1, WAVE_PARAMETER).sn


@dataclass(frozen=True)
class QuadratureSpec:
    """Composite Gauss-Legendre with ``panels_per_period`` panels of ``order`` nodes.

    ``window`` (in periods) is the half-width integrated over when a kernel
    has no step-function support.
    """

    panels_per_period: int = 16
    order: int = 8
    window: float = 1.0

    def step(self, period: float) -> float:
        return period / (self.panels_per_period * self.order)

    def nodes(self, a: float, b: float, period: float):
        if self.step(period) > period / 32.0:
            warnings.warn(f"quadrature step {self.step(period)!r} exceeds period/32",
                          UnderResolvedWarning, stacklevel=3)
        return composite_gauss(a, b, period / self.panels_per_period, self.order)


_ANCHORS = ("y", "z", "symmetric")


def _g1_factor(kern: RestFrameKernels, t1, ty, tz, anchor: str):
    if anchor == "y":
        return kern.G1(t1 - ty)
    if anchor == "z":
        return kern.G1(t1 - tz)
    return 0.5 * (kern.G1(t1 - ty) + kern.G1(t1 - tz))


def _g3_many(tx, ty: float, tz: float, kern: RestFrameKernels, quad: QuadratureSpec,
             anchor: str) -> np.ndarray:
    """``G3`` for an array of output times ``tx`` and fixed ``ty, tz``."""
    tx = np.atleast_1d(np.asarray(tx, dtype=float))
    out = np.zeros_like(tx)
    lam = kern.lam
    for i, x in enumerate(tx):
        if kern.retarded:
            a, b = max(ty, tz), x
        else:
            w = quad.window * kern.period
            a, b = min(x, ty, tz) - w, max(x, ty, tz) + w
        t1, wts = quad.nodes(a, b, kern.period)
        if t1.size == 0:
            continue
        f = (kern.G2(x - t1) * _g1_factor(kern, t1, ty, tz, anchor)
             * kern.G2(t1 - ty) * kern.G2(t1 - tz))
        out[i] = -6.0 * lam * ordered_sum(wts * f)
    return out


def g3_convolution(tx: float, ty: float, tz: float, kernels: RestFrameKernels | None = None,
                   quad: QuadratureSpec = QuadratureSpec(), anchor: str = "y") -> float:
    """Three-point function ``G3(x - y, x - z)`` from its integral representation.

    ``anchor`` selects the argument of the one-point factor: ``"y"`` follows
    the integral as written (``G1(x1 - y)``), which is not symmetric under
    ``y <-> z``; ``"symmetric"`` averages the ``y`` and ``z`` anchors.
    Returns exactly 0 when the retarded support is empty.
    """
    if anchor not in _ANCHORS:
        raise ValueError(f"anchor must be one of {_ANCHORS}, got {anchor!r}")
    kern = RestFrameKernels() if kernels is None else kernels
    return float(_g3_many(tx, ty, tz, kern, quad, anchor)[0])


def g4_convolution(tx: float, ty: float, tz: float, tw: float,
                   kernels: RestFrameKernels | None = None,
                   quad: QuadratureSpec = QuadratureSpec()) -> float:
    """Four-point function ``G4(x - y, x - z, x - w)``.

    The quartic term plus the three ``G1 G2 G3`` terms, each with the
    one-point factor taken at ``x1`` minus the partner point of its ``G2``.
    Inner three-point functions use the ``"y"`` anchor.
    """
    kern = RestFrameKernels() if kernels is None else kernels
    lam = kern.lam
    if kern.retarded:
        a, b = max(ty, tz, tw), tx
    else:
        w = quad.window * kern.period
        a, b = min(tx, ty, tz, tw) - w, max(tx, ty, tz, tw) + w
    t1, wts = quad.nodes(a, b, kern.period)
    if t1.size == 0:
        return 0.0
    outer = kern.G2(tx - t1)
    quartic = outer * kern.G2(t1 - ty) * kern.G2(t1 - tz) * kern.G2(t1 - tw)
    mixed = np.zeros_like(t1)
    for partner, (u, v) in ((ty, (tz, tw)), (tz, (ty, tw)), (tw, (ty, tz))):
        g3 = _g3_many(t1, u, v, kern, quad, "y")
        mixed += kern.G1(t1 - partner) * kern.G2(t1 - partner) * g3
    return -6.0 * lam * ordered_sum(wts * quartic) - 6.0 * lam * ordered_sum(wts * outer * mixed)


@dataclass(frozen=True)
class OriginCertificate:
    value: float
    certificate: str
    numeric: float


def g3_at_origin(lam: float = 2.0, mu: float = 1.0, kernels: RestFrameKernels | None = None,
                 quad: QuadratureSpec = QuadratureSpec()) -> OriginCertificate:
    """``G3(0, 0)``: zero because ``G2(x - x1) G2(x1 - x)`` has disjoint support.

    ``numeric`` integrates the full integrand over a window of
    ``quad.window`` periods on each side without using the support argument,
    so a kernel lacking the step function shows up as a nonzero value.
    """
    kern = RestFrameKernels(lam, mu) if kernels is None else kernels
    w = quad.window * kern.period
    t1, wts = quad.nodes(-w, w, kern.period)
    f = kern.G2(-t1) * kern.G1(t1) * kern.G2(t1) * kern.G2(t1)
    numeric = -6.0 * kern.lam * ordered_sum(wts * f)
    value = 0.0 if kern.retarded else numeric
    cert = "support-disjoint" if kern.retarded else "none"
    return OriginCertificate(value, cert, numeric)


# --------------------------------------------------------------- Yang-Mills


def two_point_check(lam: float, mu: float, p: FourMomentum | None = None, k: int = 0,
                    n_levels: int = 3, tol: float = 1e-8) -> ResidualReport:
    """Scalar two-point checks: classical residual, kernel jump and ODE, spectrum."""
    sol = ScalarWaveSolution(lam, mu, p=p)
    rep = ResidualReport("two-point", {"lambda": lam, "mu": mu, "k": k})
    rep.add(Check.below("classical_residual", g1_residual(sol), tol))
    jump_err, ode = g2_greens_residual(lam, mu, k)
    rep.add(Check.below("jump_error", jump_err, tol))
    rep.add(Check.below("ode_residual", ode, tol))
    for n in range(n_levels):
        rep.params[f"m_{n}"] = mass_n(n, lam, mu)
    return rep


def ym_two_point_check(N: int, g: float, mu: float, p: FourMomentum | None = None,
                       k: int = 0, tol: float = 1e-8) -> ResidualReport:
    """Landau-gauge gluon two-point checks via the scalar map ``lam = N g**2``.

    ``p`` must satisfy ``p**2 = mu**2 sqrt(N g**2 / 2)`` (default: rest
    frame).  Adds transversality and idempotence of the projector and a
    direct evaluation of the gluon mass formula against the scalar one.
    """
    lam = N * g * g
    p2 = mu * mu * math.sqrt(lam / 2.0)
    if p is None:
        p = FourMomentum.rest(p2)
    elif abs(p.square - p2) > 1e-12 * max(1.0, p2):
        raise DispersionError(f"p^2={p.square!r} but the gluon wave needs p^2={p2!r}")
    rep = two_point_check(lam, mu, p, k, tol=tol)
    rep.command = "ym-two-point"
    rep.params.update({"N": N, "g": g})
    proj = TransverseProjector(p)
    rep.add(Check.below("transversality", float(np.max(np.abs(proj.contract()))), 1e-12))
    rep.add(Check.below("idempotence", proj.idempotence_error(), 1e-12))
    m0 = math.pi / (2.0 * complete_K(WAVE_PARAMETER)) * (N * g * g / 2.0) ** 0.25 * mu
    rep.add(Check.below("mass_map", abs(m0 - mass_n(0, lam, mu)), 1e-12 * m0))
    return rep


@dataclass(frozen=True)
class GhostResult:
    propagator: float
    pole: bool
    free_jump: float
    K2_zero: bool = True


def ghost_check(p2: float) -> GhostResult:
    """Free ghost: ``-1/p**2`` in momentum space (from ``d^2 P = delta``).

    ``p**2 = 0`` returns an infinite value with ``pole=True``.  The free
    kernel ``t theta(t)`` of ``d^2/dt^2`` is checked for a unit jump.
    """
    pole = p2 == 0
    if pole:
        warnings.warn("ghost propagator evaluated at its pole p^2 = 0", NearPoleWarning,
                      stacklevel=2)
        value = -math.inf
    else:
        value = -1.0 / p2

    def free(t):
        t = np.asarray(t, dtype=float)
        return np.where(t > 0, t, 0.0)

    return GhostResult(value, pole, derivative_jump(free, 0.0, 1e-3))
