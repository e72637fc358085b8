"""Shared quadrature helpers: mapped Gauss rules and oscillation-adapted panels.

Everything here is plain numerics with no domain knowledge; the kernel
modules build their singular and oscillatory integrals on top of these.
"""

from __future__ import annotations

from functools import lru_cache

import numpy as np
from scipy.special import roots_jacobi, roots_legendre


@lru_cache(maxsize=128)
def _gl_rule(n: int):
    x, w = roots_legendre(n)
    return x, w


def gauss_legendre(a: float, b: float, n: int):
    """Nodes and weights of the n-point Gauss-Legendre rule on [a, b]."""
    x, w = _gl_rule(n)
    half = 0.5 * (b - a)
    return a + half * (x + 1.0), half * w


def panel_nodes(breaks, n: int):
    """Composite Gauss-Legendre nodes/weights over consecutive panels.

    ``breaks`` is an increasing sequence of panel edges.
    """
    breaks = np.asarray(breaks, dtype=float)
    x, w = _gl_rule(n)
    half = 0.5 * np.diff(breaks)
    mid = 0.5 * (breaks[1:] + breaks[:-1])
    nodes = (mid[:, None] + half[:, None] * x[None, :]).ravel()
    weights = (half[:, None] * w[None, :]).ravel()
    return nodes, weights


def oscillatory_breaks(a: float, b: float, phase_span: float,
                       max_panels: int = 4000, rad_per_panel: float = 2.0,
                       min_panels: int = 1):
    """Uniform panel edges on [a, b] sized so each panel sees a bounded
    phase increment (``phase_span`` is the total phase variation).
    """
    n = int(max(min_panels, min(max_panels, np.ceil(abs(phase_span) / rad_per_panel))))
    return np.linspace(a, b, n + 1)


def with_edge_refinement(breaks, edges, levels: int = 16):
    """Add geometrically graded panel edges approaching each point in
    ``edges`` from both sides (exp-type bumps have boundary layers that
    uniform panels miss)."""
    breaks = np.asarray(breaks, dtype=float)
    a, b = breaks[0], breaks[-1]
    extra = []
    width = b - a
    for e in edges:
        for i in range(1, levels + 1):
            h = width * 0.25 * 2.0 ** (-i)
            for p in (e - h, e + h):
                if a < p < b:
                    extra.append(p)
    out = np.unique(np.concatenate([breaks, extra]))
    return out[np.concatenate([[True], np.diff(out) > 1e-15 * max(1.0, abs(b))])]


@lru_cache(maxsize=64)
def _gj_rule(n: int, alpha: float, beta: float):
    x, w = roots_jacobi(n, alpha, beta)
    return x, w


def gauss_jacobi_m_half(a: float, b: float, n: int):
    """Rule for integrals with a (b - s)^(-1/2) endpoint singularity.

    Returns nodes s_i in (a, b) and weights w_i such that
    ``sum w_i * g(s_i)`` approximates ``int_a^b (b - s)^(-1/2) g(s) ds``
    for smooth g.
    """
    x, w = _gj_rule(n, -0.5, 0.0)
    half = 0.5 * (b - a)
    s = a + half * (x + 1.0)
    # (b - s) = half*(1 - x); the Jacobi weight absorbs (1-x)^(-1/2).
    return s, w * np.sqrt(half)


def gauss_chebyshev_both(a: float, b: float, n: int):
    """Rule for integrals with (s - a)^(-1/2)(b - s)^(-1/2) singularities.

    Weights include the singular factor, so pass only the smooth part.
    """
    k = np.arange(1, n + 1)
    x = np.cos((2 * k - 1) * np.pi / (2 * n))
    half = 0.5 * (b - a)
    s = a + half * (x + 1.0)
    # int (1-x^2)^(-1/2) g dx on [-1,1] with equal weights pi/n; the
    # half-length Jacobians of the map and of the weight cancel.
    return s, np.full(n, np.pi / n)


def fit_power_law(x, y):
    """Least squares slope/intercept/residual of log y against log x."""
    lx = np.log(np.asarray(x, dtype=float))
    ly = np.log(np.asarray(y, dtype=float))
    coef, res = np.polynomial.polynomial.polyfit(lx, ly, 1, full=True)
    intercept, slope = coef
    n = len(lx)
    rms = float(np.sqrt(res[0][0] / n)) if len(res[0]) else 0.0
    return float(slope), float(intercept), rms
