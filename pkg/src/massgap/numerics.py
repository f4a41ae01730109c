"""Finite-difference stencils and small quadrature helpers shared by the checks."""
from __future__ import annotations

import math

import numpy as np

#: Default step for the centred 4th-order stencil on functions of the wave phase.
#: Balances truncation (~h**4) against rounding (~eps / h**2); a power of two
#: so that ``x + k*h`` is exact for the grids used here.
DEFAULT_STEP = 2.0**-9


def second_derivative(f, x, h: float = DEFAULT_STEP):
    """Centred five-point (4th-order) second derivative of ``f`` at ``x``."""
    if not (h > 0.0 and math.isfinite(h)):
        raise ValueError(f"finite-difference step must be positive, got {h!r}")
    x = np.asarray(x, dtype=float)
    return (
        -f(x + 2 * h) + 16.0 * f(x + h) - 30.0 * f(x) + 16.0 * f(x - h) - f(x - 2 * h)
    ) / (12.0 * h * h)


def first_derivative(f, x, h: float = DEFAULT_STEP):
    """Centred five-point (4th-order) first derivative."""
    x = np.asarray(x, dtype=float)
    return (-f(x + 2 * h) + 8.0 * f(x + h) - 8.0 * f(x - h) + f(x - 2 * h)) / (12.0 * h)


def one_sided_derivative(f, x0: float, h: float, side: int = +1) -> float:
    """4th-order one-sided first derivative at ``x0`` from the ``side`` half-line.

    Only samples strictly on one side (plus ``x0`` approached from that side)
    are used, so ``f`` may be discontinuous in its derivative at ``x0``.
    """
    s = 1.0 if side > 0 else -1.0
    # f evaluated at x0 +- 0 is represented by a tiny offset so that Heaviside
    # factors select the intended branch.
    tiny = s * 1e-300
    pts = [f(x0 + tiny)] + [f(x0 + s * j * h) for j in range(1, 5)]
    d = (-25.0 * pts[0] + 48.0 * pts[1] - 36.0 * pts[2] + 16.0 * pts[3] - 3.0 * pts[4]) / (
        12.0 * h
    )
    return s * float(d)


def derivative_jump(f, x0: float = 0.0, h: float = 1e-3) -> float:
    """``f'(x0+) - f'(x0-)`` from one-sided stencils."""
    return one_sided_derivative(f, x0, h, +1) - one_sided_derivative(f, x0, h, -1)


def value_jump(f, x0: float = 0.0) -> float:
    return float(f(x0 + 1e-300) - f(x0 - 1e-300))


_GL_CACHE: dict[int, tuple[np.ndarray, np.ndarray]] = {}


def gauss_legendre(order: int):
    if order not in _GL_CACHE:
        _GL_CACHE[order] = np.polynomial.legendre.leggauss(order)
    return _GL_CACHE[order]


def composite_gauss(a: float, b: float, panel_width: float, order: int = 8):
    """Nodes and weights of composite Gauss-Legendre on ``[a, b]``.

    The interval is split into ``ceil((b - a) / panel_width)`` equal panels.
    Returns empty arrays when ``b <= a``.
    """
    if not b > a:
        return np.empty(0), np.empty(0)
    n_panels = max(1, int(math.ceil((b - a) / panel_width)))
    x, w = gauss_legendre(order)
    edges = np.linspace(a, b, n_panels + 1)
    half = 0.5 * np.diff(edges)
    mid = 0.5 * (edges[1:] + edges[:-1])
    nodes = (mid[:, None] + half[:, None] * x[None, :]).ravel()
    weights = (half[:, None] * w[None, :]).ravel()
    return nodes, weights


def ordered_sum(values) -> float:
    """Deterministic compensated sum (``math.fsum``) of a sequence."""
    if not isinstance(values, np.ndarray):
        values = list(values)
    return math.fsum(float(v) for v in np.ravel(values))


def richardson_second_derivative(f, x, h: float = DEFAULT_STEP):
    """6th-order estimate ``(16 D(h) - D(2h)) / 15`` from two 4th-order stencils."""
    return (16.0 * second_derivative(f, x, h) - second_derivative(f, x, 2.0 * h)) / 15.0
