r"""Jacobi elliptic functions and the complete elliptic integral K.

Everything here uses the *parameter* convention: the second argument ``m``
enters as ``dn**2 = 1 - m * sn**2``, so ``sn(u, -1)`` means parameter
``m = -1`` (equivalently, imaginary modulus ``k = i``).  With this reading
``K(-1) = 1.3110287771...`` and the mass-gap formula built on it reproduces
the reported spectrum.

Parameters ``0 <= m < 1`` go through the descending Landen / AGM scheme.
Negative parameters are mapped to ``m' = -m / (1 - m)`` in ``(0, 1)`` with the
real imaginary-modulus transformation

.. math::

    \operatorname{sn}(u|m) = \frac{\operatorname{sd}(v|m')}{\sqrt{1-m}},\quad
    \operatorname{cn}(u|m) = \operatorname{cd}(v|m'),\quad
    \operatorname{dn}(u|m) = \operatorname{nd}(v|m'),\qquad v = u\sqrt{1-m},

so no complex arithmetic is ever needed.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

__all__ = [
    "EllipticDomainError",
    "EllipticValue",
    "complete_K",
    "jacobi",
    "phase_root",
    "WAVE_PARAMETER",
]

#: The parameter value used by every closed form of the scalar/gauge waves.
WAVE_PARAMETER = -1.0

_AGM_MAX_ITER = 64
_AGM_TOL = 1e-15


class EllipticDomainError(ValueError):
    """Raised for a parameter outside the supported range ``m < 1``."""


@dataclass(frozen=True)
class EllipticValue:
    """The triple ``(sn, cn, dn)`` at argument ``u`` and parameter ``m``.

    Fields are floats for scalar ``u`` and arrays for array ``u``.
    """

    u: float | np.ndarray
    m: float
    sn: float | np.ndarray
    cn: float | np.ndarray
    dn: float | np.ndarray

    def __iter__(self):
        return iter((self.sn, self.cn, self.dn))


def _check_parameter(m: float) -> float:
    m = float(m)
    if not math.isfinite(m):
        raise EllipticDomainError(f"parameter must be finite, got {m!r}")
    if m >= 1.0:
        raise EllipticDomainError(
            f"parameter m={m!r} not supported: need m < 1 for a real quarter period"
        )
    return m


def _agm_chain(m: float):
    """AGM sequences ``a_n, c_n`` for ``0 <= m < 1``."""
    a = [1.0]
    c = [math.sqrt(m)]
    b = math.sqrt(1.0 - m)
    for _ in range(_AGM_MAX_ITER):
        if abs(c[-1]) <= _AGM_TOL * a[-1]:
            break
        an = 0.5 * (a[-1] + b)
        c.append(0.5 * (a[-1] - b))
        b = math.sqrt(a[-1] * b)
        a.append(an)
    return a, c


def _K_unit(m: float) -> float:
    a, _ = _agm_chain(m)
    return math.pi / (2.0 * a[-1])


def complete_K(m: float) -> float:
    """Complete elliptic integral of the first kind, parameter convention.

    Parameters
    ----------
    m : float
        Parameter, ``m < 1``.  Negative values use the imaginary-modulus
        transformation ``K(m) = K(m') / sqrt(1 - m)`` with
        ``m' = -m / (1 - m)``.

    Returns
    -------
    float
        The quarter period ``K(m) > 0``.

    Raises
    ------
    EllipticDomainError
        If ``m >= 1`` or ``m`` is not finite.
    """
    m = _check_parameter(m)
    if m < 0.0:
        mp = -m / (1.0 - m)
        return _K_unit(mp) / math.sqrt(1.0 - m)
    return _K_unit(m)


def _reduce(u: np.ndarray, period: float) -> np.ndarray:
    """``u`` modulo ``period`` into ``[-period/2, period/2]``.

    The period is split into a short high part (exact products with the
    integer multiple) and a small low part, so the reduced argument carries
    an error of order ``eps * period`` rather than ``eps * |u|``.
    """
    hi = math.ldexp(round(math.ldexp(period, 24)), -24)
    lo = period - hi
    n = np.round(u / period)
    return (u - n * hi) - n * lo


def _jacobi_unit(u: np.ndarray, m: float):
    # 0 <= m < 1, |u| at most about two quarter periods
    if m == 0.0:
        return np.sin(u), np.cos(u), np.ones_like(u)
    a, c = _agm_chain(m)
    n = len(a) - 1
    phi = (2.0**n) * a[n] * u
    for j in range(n, 0, -1):
        phi = 0.5 * (phi + np.arcsin(c[j] / a[j] * np.sin(phi)))
    sn = np.sin(phi)
    cn = np.cos(phi)
    dn = np.sqrt(1.0 - m * sn * sn)
    return sn, cn, dn


def jacobi(u, m: float) -> EllipticValue:
    """Evaluate ``sn``, ``cn`` and ``dn`` at real argument ``u``.

    Parameters
    ----------
    u : float or array_like
        Real argument(s).
    m : float
        Parameter, ``m < 1`` (the scalar wave uses ``m = -1``).

    Returns
    -------
    EllipticValue
    """
    m = _check_parameter(m)
    scalar = np.ndim(u) == 0
    uu = np.asarray(u, dtype=float)
    if not np.all(np.isfinite(uu)):
        raise ValueError("argument u must be finite")
    # sn, cn have real period 4K(m); reducing before any scaling keeps
    # neighbouring finite-difference samples consistent to rounding.
    ur = _reduce(uu, 4.0 * complete_K(m))
    if m < 0.0:
        scale = math.sqrt(1.0 - m)
        s, c, d = _jacobi_unit(ur * scale, -m / (1.0 - m))
        sn, cn, dn = s / (d * scale), c / d, 1.0 / d
    else:
        sn, cn, dn = _jacobi_unit(ur, m)
    if scalar:
        return EllipticValue(float(uu), m, float(sn), float(cn), float(dn))
    return EllipticValue(uu, m, sn, cn, dn)


def phase_root(k: int) -> float:
    """Phase ``(4k + 1) K(-1)``, a zero of ``cn(., -1)`` where ``sn = 1``."""
    if int(k) != k:
        raise ValueError(f"phase index must be an integer, got {k!r}")
    return (4 * int(k) + 1) * complete_K(WAVE_PARAMETER)
