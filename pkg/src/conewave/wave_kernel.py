"""Closed-form sine-propagator kernel on the cone: geometric (image sum)
and diffracted (tip wave) parts, plus a two-pipeline pairing check against
the truncated spectral sum.

The geometric part is the image sum

    K_geom = sum_{-pi <= dtheta + 2 pi rho j <= pi} (t^2 - chord^2)_+^(-1/2),

and the diffracted part, supported in t > r1 + r2, is

    K_diff = -1/(4 pi^2 rho sqrt(2 r1 r2)) *
             int_0^beta (alpha - cosh s)^(-1/2)
                  [ sin(phi1)/(cosh(s/rho) - cos phi1)
                  + sin(phi2)/(cosh(s/rho) - cos phi2) ] ds.

The full propagator pairing uses K_geom/(2 pi) + K_diff; the plane
fundamental solution carries the 1/(2 pi) while the diffracted constant is
already absolute.  The spectral cross-check in the tests certifies this
relative normalization.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .cone_geom import Cone, PolarPoint, chord, diffraction_geometry, image_angles
from .errors import DomainError, SingularConfigurationError
from .quadrature import gauss_jacobi_m_half, gauss_legendre, panel_nodes
from .spectrum import EigenMode, TruncatedCone, _mode
from .special_fn import bessel_zeros_upto

TWO_PI = 2.0 * math.pi


@dataclass(frozen=True)
class KernelSample:
    """One kernel evaluation; geom_value is +inf on the light cone."""

    t: float
    p1: PolarPoint
    p2: PolarPoint
    geom_value: float
    diff_value: float
    quadrature_error_estimate: float


def geom_kernel(t: float, p1: PolarPoint, p2: PolarPoint, cone: Cone,
                singular_tol: float = 1e-9) -> float:
    """Image sum of (t^2 - chord^2)_+^(-1/2); returns +inf within
    singular_tol of a light cone crossing."""
    if t <= 0.0:
        raise DomainError("geom_kernel requires t > 0")
    total = 0.0
    for psi in image_angles(p1.theta, p2.theta, cone):
        c = chord(p1.r, p2.r, psi)
        if abs(t - c) < singular_tol * max(1.0, t):
            return math.inf
        if t > c:
            total += 1.0 / math.sqrt(t * t - c * c)
    return total


def _off_front(phi: float, tol: float = 1e-8) -> None:
    if abs(phi - TWO_PI * round(phi / TWO_PI)) < tol:
        raise SingularConfigurationError(
            f"angle {phi} lies on the diffracted-front singular set")


def _diff_bracket(s, rho: float, phi1: float, phi2: float):
    ch = np.cosh(s / rho)
    return (math.sin(phi1) / (ch - math.cos(phi1))
            + math.sin(phi2) / (ch - math.cos(phi2)))


def _diff_quad(t, r1, r2, rho, phi1, phi2, n: int) -> float:
    geo = diffraction_geometry(t, r1, r2, 0.0, Cone(rho))  # alpha, beta only
    alpha, beta = geo.alpha, geo.beta
    if beta == 0.0:
        return 0.0
    s, w = gauss_jacobi_m_half(0.0, beta, n)
    # alpha - cosh s = (beta - s) h(s) with h smooth, h(beta) = sinh beta
    h = (alpha - np.cosh(s)) / (beta - s)
    vals = _diff_bracket(s, rho, phi1, phi2) / np.sqrt(h)
    return float(np.dot(w, vals))


def diff_kernel(t: float, p1: PolarPoint, p2: PolarPoint, cone: Cone,
                n_nodes: int = 32, with_error: bool = False):
    """Diffracted kernel value; 0 for t <= r1 + r2.

    Gauss-Jacobi quadrature absorbs the (alpha - cosh s)^(-1/2) endpoint
    singularity exactly.  ``with_error`` also returns a node-doubling
    error estimate.
    """
    r1, r2 = p1.r, p2.r
    if r1 <= 0.0 or r2 <= 0.0:
        raise DomainError("diff_kernel requires r1, r2 > 0")
    if t <= r1 + r2:
        return (0.0, 0.0) if with_error else 0.0
    dtheta = cone.reduce_angle(p1.theta - p2.theta)
    geo = diffraction_geometry(t, r1, r2, dtheta, cone)
    _off_front(geo.phi1)
    _off_front(geo.phi2)
    pref = -1.0 / (4.0 * math.pi ** 2 * cone.rho * math.sqrt(2.0 * r1 * r2))
    val = pref * _diff_quad(t, r1, r2, cone.rho, geo.phi1, geo.phi2, n_nodes)
    if not with_error:
        return val
    val2 = pref * _diff_quad(t, r1, r2, cone.rho, geo.phi1, geo.phi2, 2 * n_nodes)
    return val2, abs(val2 - val)


def kernel_sample(t: float, p1: PolarPoint, p2: PolarPoint, cone: Cone) -> KernelSample:
    dv, err = diff_kernel(t, p1, p2, cone, with_error=True)
    return KernelSample(t=t, p1=p1, p2=p2,
                        geom_value=geom_kernel(t, p1, p2, cone),
                        diff_value=dv, quadrature_error_estimate=err)


# ---------------------------------------------------------------------------
# propagator pairing <E(t) f, g>, two independent pipelines
# ---------------------------------------------------------------------------

def _bump(x):
    """Standard C^infty bump exp(-1/(1-x^2)) on (-1, 1)."""
    x = np.asarray(x, dtype=float)
    out = np.zeros_like(x)
    inside = np.abs(x) < 1.0
    xi = x[inside]
    out[inside] = np.exp(-1.0 / (1.0 - xi * xi))
    return out


@dataclass(frozen=True)
class ConeBump:
    """Smooth compactly supported test datum: a radial bump times a finite
    angular Fourier sum, f(r, theta) = B((r-c)/w) * sum_k a_k e^{ik theta/rho}.
    """

    r_center: float
    r_width: float
    angular: dict = field(default_factory=lambda: {0: 1.0})

    @property
    def support_radius(self) -> float:
        return self.r_center + self.r_width

    def radial(self, r):
        return _bump((np.asarray(r, dtype=float) - self.r_center) / self.r_width)

    def coeff(self, k: int) -> complex:
        return complex(self.angular.get(k, 0.0))

    def sample(self, r, theta, rho: float):
        rr = np.asarray(r, dtype=float)
        tt = np.asarray(theta, dtype=float)
        ang = sum(a * np.exp(1j * k * tt / rho) for k, a in self.angular.items())
        return self.radial(rr) * ang


def _graded_breaks(a: float, b: float, edge_scale: float, max_levels: int = 30):
    """Panel edges on [a, b] refining geometrically toward b."""
    width = b - a
    if edge_scale >= width or edge_scale <= 0.0:
        return np.array([a, b])
    levels = min(max_levels, int(math.ceil(math.log2(width / edge_scale))))
    edges = [b - width * 0.5 ** i for i in range(levels + 1)]
    return np.array([a] + edges[1:] + [b])


def _geom_mode_kernel(t: float, r1: np.ndarray, r2: float, k: int, rho: float,
                      n_gl: int = 12) -> np.ndarray:
    """Angular Fourier coefficient of the geometric kernel,

        int over the image window of (t^2 - chord(psi)^2)_+^(-1/2)
             cos(k psi / rho) dpsi,

    vectorized over r1.  Endpoint/light-cone singularities are handled by
    the substitution sin(psi/2) = kappa sin(phi) (subcritical case) and by
    graded panels (supercritical case).
    """
    r1 = np.asarray(r1, dtype=float)
    out = np.zeros_like(r1)

    cosc = (r1 * r1 + r2 * r2 - t * t) / (2.0 * r1 * r2)  # cos of cutoff angle

    sub = cosc > -1.0  # t < r1 + r2: integral stops at psi* < pi
    if np.any(sub):
        kappa = np.sqrt(0.5 * (1.0 - cosc[sub]))  # sin(psi*/2)
        scale = np.sqrt(np.maximum(1.0 - kappa ** 2, 1e-28)).min()
        breaks = _graded_breaks(0.0, 0.5 * math.pi, 0.25 * scale)
        phi, wphi = panel_nodes(breaks, n_gl)
        sphi = np.sin(phi)[None, :]
        ksin = kappa[:, None] * sphi
        psi = 2.0 * np.arcsin(np.clip(ksin, -1.0, 1.0))
        integ = np.cos(k * psi / rho) / np.sqrt(np.maximum(1.0 - ksin ** 2, 1e-30))
        out[sub] = (2.0 / np.sqrt(r1[sub] * r2)) * (integ @ wphi)

    sup = ~sub  # t > r1 + r2: full window [0, pi], peak at pi
    if np.any(sup):
        gap = (-1.0 - cosc[sup]).min()
        breaks = _graded_breaks(0.0, math.pi, 0.5 * math.sqrt(max(2.0 * gap, 1e-28)))
        psi, wpsi = panel_nodes(breaks, n_gl)
        denom = np.cos(psi)[None, :] - cosc[sup][:, None]
        integ = np.cos(k * psi / rho)[None, :] / np.sqrt(np.maximum(denom, 1e-300))
        out[sup] = (2.0 / np.sqrt(2.0 * r1[sup] * r2)) * (integ @ wpsi)
    return out


def _diff_mode_kernel(t: float, r1: np.ndarray, r2: float, k: int, rho: float,
                      n_gj: int = 48) -> np.ndarray:
    """Angular Fourier coefficient of the diffracted kernel.  The circle
    integral of the bracket against e^{-ik theta/rho} is exact
    (conjugate-Poisson series), leaving

        -sgn(k) sin(k pi/rho) / (pi sqrt(2 r1 r2)) *
        int_0^beta (alpha - cosh s)^(-1/2) e^(-|k| s/rho) ds,

    vectorized over r1 (zero where t <= r1 + r2, and for k = 0).
    """
    r1 = np.asarray(r1, dtype=float)
    out = np.zeros_like(r1)
    if k == 0:
        return out
    live = t > r1 + r2
    if not np.any(live):
        return out
    rr = r1[live]
    alpha = (t * t - rr * rr - r2 * r2) / (2.0 * rr * r2)
    alpha = np.maximum(alpha, 1.0)
    beta = np.arccosh(alpha)
    vals = np.empty_like(rr)
    for i, (a, b) in enumerate(zip(alpha, beta)):
        if b == 0.0:
            vals[i] = 0.0
            continue
        s, w = gauss_jacobi_m_half(0.0, b, n_gj)
        h = (a - np.cosh(s)) / (b - s)
        vals[i] = np.dot(w, np.exp(-abs(k) * s / rho) / np.sqrt(h))
    pref = -math.copysign(1.0, k) * math.sin(k * math.pi / rho)
    out[live] = pref / (math.pi * np.sqrt(2.0 * rr * r2)) * vals
    return out


def modes_for_k(tc: TruncatedCone, k: int, lambda_max: float):
    """Modes with a fixed angular index, lambda <= lambda_max."""
    nu = abs(k) / tc.rho
    out = []
    for m, j in enumerate(bessel_zeros_upto(nu, lambda_max * tc.R), start=1):
        base = _mode(tc, k, j)
        out.append(EigenMode(k, m, base.nu, base.lam, base.norm_const))
    return out


@dataclass(frozen=True)
class PairingResult:
    closed_form: float
    spectral: float
    difference: float
    spectral_tail_estimate: float


def propagator_pairing(t: float, f: ConeBump, g: ConeBump, tc: TruncatedCone,
                       lambda_max: float = 120.0, n_r: int = 48,
                       n_panel: int = 24) -> PairingResult:
    """<E(t) f, g> with E = sin(t sqrt(Delta))/sqrt(Delta), two ways:

    (a) quadrature of the closed-form kernel K_geom/(2 pi) + K_diff,
        reduced over the angular convolution mode by mode, with the
        radial quadrature split along the light-cone ridge r1 + r2 = t;
    (b) the spectral sum over modes below lambda_max, with a tail report.
    """
    rho = tc.rho
    if t + max(f.support_radius, g.support_radius) >= tc.R:
        raise DomainError(
            "finite-speed precondition violated: t + support radius must "
            "stay below the truncation wall")
    ks = sorted(set(f.angular) & set(g.angular))

    # pipeline (a): closed-form kernel
    r2, w2 = gauss_legendre(max(g.r_center - g.r_width, 1e-9),
                            g.support_radius, n_r)
    f_lo = max(f.r_center - f.r_width, 1e-9)
    f_hi = f.support_radius
    closed = 0.0
    for k in ks:
        ck = f.coeff(k) * np.conj(g.coeff(k))
        if ck == 0.0:
            continue
        acc = 0.0
        for rb, wb in zip(r2, w2):
            ridge = t - rb
            breaks = [f_lo]
            if f_lo < ridge < f_hi:
                breaks.append(ridge)
            breaks.append(f_hi)
            r1, w1 = panel_nodes(np.array(breaks), n_panel)
            kern = (_geom_mode_kernel(t, r1, rb, k, rho) / TWO_PI
                    + _diff_mode_kernel(t, r1, rb, k, rho))
            acc += wb * rb * g.radial(rb) * np.dot(w1 * r1 * f.radial(r1), kern)
        closed += (2.0 * math.pi * rho) * float((ck * acc).real)

    # pipeline (b): spectral sum
    rs, ws = gauss_legendre(0.0, max(f.support_radius, g.support_radius),
                            4 * n_r)
    spectral = 0.0
    tail = 0.0
    for k in ks:
        ck = f.coeff(k) * np.conj(g.coeff(k))
        if ck == 0.0:
            continue
        frad = f.radial(rs) * rs * ws
        grad = g.radial(rs) * rs * ws
        for md in modes_for_k(tc, k, lambda_max):
            prof = md.radial(rs)
            cf = TWO_PI * rho * np.dot(frad, prof)
            cg = TWO_PI * rho * np.dot(grad, prof)
            term = float((ck * cf * cg).real)
            contrib = math.sin(t * md.lam) / md.lam * term
            spectral += contrib
            if md.lam > 0.8 * lambda_max:
                tail += abs(term) / md.lam
    return PairingResult(closed_form=closed, spectral=spectral,
                         difference=closed - spectral,
                         spectral_tail_estimate=tail)
