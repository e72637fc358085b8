"""Smoothed spectral-projector kernels: the chi(sqrt(Delta) - lambda)
window profile, its plane convolution kernel, the cone cluster kernels
(geometric and diffracted), the conjugate-Poisson approximation H with its
Fourier multiplier, Littlewood-Paley cutoffs, and the Young-inequality
angular norms.

Conventions.  chi_hat is the standard bump B((|t| - 3 delta/2)/(delta/2)),
B(x) = exp(-1/(1-x^2)), supported in {|t| in (delta, 2 delta)}; chi is its
inverse transform chi(x) = (1/pi) int_0^inf cos(t x) chi_hat(t) dt.  The
window amplitude is

    a_lam(zeta) = lam * int e^{-i tau lam zeta} b(lam zeta (1 - tau))
                         psi(tau) chi(lam tau) dtau,

the exact Parseval rewrite of the chi_hat-side convolution formula; here
psi is an even bump equal to 1 on [-1/4, 1/4] and supported in
(-1/2, 1/2), and b is the Bessel phase-amplitude J_0(z) = Re(e^{iz} b(z)),
realized exactly as b = e^{-iz}(J_0 + i (1-w) Y_0) with a smooth switch w
shutting the Y_0 part off below z = 6 (Y_0 is singular at 0, and any
imaginary part keeps the identity exact).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.interpolate import CubicSpline
from scipy.special import j0, y0

from .cone_geom import D as cone_D
from .cone_geom import chord
from .errors import DomainError, RegimeError, SingularConfigurationError
from .quadrature import gauss_legendre, panel_nodes, with_edge_refinement
from .special_fn import SQRT_PI, fresnel_moment, kummer_F

TWO_PI = 2.0 * math.pi


# ---------------------------------------------------------------------------
# bumps and the chi profile
# ---------------------------------------------------------------------------

def bump(x):
    """exp(-1/(1-x^2)) on (-1, 1), zero outside."""
    x = np.asarray(x, dtype=float)
    out = np.zeros_like(x)
    inside = np.abs(x) < 1.0
    xi = x[inside]
    out[inside] = np.exp(-1.0 / (1.0 - xi * xi))
    return out if out.ndim else float(out)


def _smoothstep(v):
    """C^infty step: 1 for v <= 0, 0 for v >= 1."""
    v = np.asarray(v, dtype=float)
    g1 = np.zeros_like(v)
    g2 = np.zeros_like(v)
    m1 = v > 0.0
    m2 = v < 1.0
    g1[m1] = np.exp(-1.0 / v[m1])
    g2[m2] = np.exp(-1.0 / (1.0 - v[m2]))
    return g2 / (g1 + g2)


def psi_bump(tau):
    """Even bump: 1 on [-1/4, 1/4], supported in (-1/2, 1/2), with smooth
    exp-type transitions (the paper's psi localizer)."""
    t = np.abs(np.asarray(tau, dtype=float))
    return _smoothstep((t - 0.25) * 4.0)


def bessel_phase_amplitude(z):
    """b(z) with J_0(z) = Re(e^{iz} b(z)) exactly; |b| ~ (2/(pi z))^(1/2)
    for large z and b(0) = 1.

    b = e^{-iz}(J_0 + i w Y_0) with the analytic switch w = 1 - e^{-(z/6)^8}:
    any real multiple of Y_0 keeps the identity exact, the switch suppresses
    the Y_0 log below z ~ 6 (series regime) and is 1 beyond z ~ 12 (Hankel
    amplitude regime), with no transition boundary layers.
    """
    z = np.asarray(z, dtype=float)
    jj = j0(z)
    yy = np.zeros_like(z)
    pos = z > 0.5  # switch weight < 1e-9 below; avoid Y_0 near its singularity
    zp = z[pos]
    yy[pos] = -np.expm1(-((zp / 6.0) ** 8)) * y0(zp)
    return np.exp(-1j * z) * (jj + 1j * yy)


@dataclass(frozen=True)
class ChiProfile:
    """Frequency window profile: delta, the transform pair, and a sampled
    frequency grid of chi."""

    delta: float
    chi0: float
    xi_grid: np.ndarray
    chi_grid: np.ndarray

    def chi_hat(self, t):
        """B((|t| - 3 delta/2)/(delta/2)): even, supported in (delta, 2 delta)."""
        t = np.abs(np.asarray(t, dtype=float))
        return bump((t - 1.5 * self.delta) / (0.5 * self.delta))

    def chi(self, xi):
        """Inverse transform (1/pi) int_0^inf cos(t xi) chi_hat(t) dt,
        evaluated on panels resolving the fastest oscillation, with
        geometric refinement into the bump's boundary layers."""
        xi = np.asarray(xi, dtype=float)
        flat = np.atleast_1d(xi).ravel()
        out = np.empty_like(flat)
        span = self.delta * float(np.max(np.abs(flat), initial=0.0))
        n_panels = 4 + int(3.0 * span / math.pi / 24.0)
        breaks = with_edge_refinement(
            np.linspace(self.delta, 2.0 * self.delta, n_panels + 1),
            (self.delta, 2.0 * self.delta))
        t, wt = panel_nodes(breaks, 24)
        ct = self.chi_hat(t) * wt
        step = max(1, 4_000_000 // max(len(t), 1))
        for i in range(0, len(flat), step):
            blk = flat[i:i + step]
            out[i:i + step] = np.cos(np.outer(blk, t)) @ ct
        out /= math.pi
        out = out.reshape(np.shape(xi))
        return float(out) if out.ndim == 0 else out


def make_chi(delta: float, grid_points: int = 4096) -> ChiProfile:
    """Window profile for a given delta in (0, 1/4]."""
    if not (0.0 < delta <= 0.25):
        raise DomainError(f"delta must lie in (0, 1/4], got {delta}")
    prof = ChiProfile(delta=delta, chi0=0.0, xi_grid=np.empty(0),
                      chi_grid=np.empty(0))
    chi0 = float(prof.chi(0.0))
    xi = np.linspace(-60.0 / delta, 60.0 / delta, grid_points)
    chi_grid = prof.chi(xi)
    prof = ChiProfile(delta=delta, chi0=chi0, xi_grid=xi, chi_grid=chi_grid)
    if not prof.chi0 > 0.0:
        raise RuntimeError("chi(0) must be positive")
    return prof


# ---------------------------------------------------------------------------
# the window amplitude a_lambda
# ---------------------------------------------------------------------------

def _tau_rule(lam: float, zeta_max: float, delta: float, refine: float = 1.0):
    """Panel rule on (-1/2, 1/2) resolving e^{-i tau lam zeta} and
    chi(lam tau), refined into the transition layers of psi."""
    span = lam * (abs(zeta_max) + 2.0 * delta)
    n_panels = int(8 + refine * 3.0 * span / math.pi / 24.0) + 1
    breaks = with_edge_refinement(np.linspace(-0.5, 0.5, n_panels + 1),
                                  (-0.5, -0.25, 0.25, 0.5), levels=12)
    return panel_nodes(breaks, 24)


def a_lambda_points(chi: ChiProfile, lam: float, zetas, refine: float = 1.0):
    """a_lam on an array of zeta values (vectorized over the tau rule)."""
    if lam < 1.0:
        raise DomainError(f"amplitude defined for lam >= 1, got {lam}")
    zetas = np.atleast_1d(np.asarray(zetas, dtype=float))
    tau, wt = _tau_rule(lam, float(zetas.max(initial=0.0)), chi.delta, refine)
    base = psi_bump(tau) * chi.chi(lam * tau) * wt
    out = np.empty(len(zetas), dtype=complex)
    chunk = max(1, 2_000_000 // max(len(tau), 1))
    for i in range(0, len(zetas), chunk):
        z = zetas[i:i + chunk][:, None]
        w_arg = lam * z * (1.0 - tau[None, :])
        vals = np.exp(-1j * tau[None, :] * lam * z) * bessel_phase_amplitude(w_arg)
        out[i:i + chunk] = lam * (vals * base[None, :]).sum(axis=1)
    return out


def a_lambda(chi: ChiProfile, lam: float, zeta: float) -> complex:
    """Window amplitude at a single zeta >= 0."""
    if zeta < 0.0:
        raise DomainError("zeta must be >= 0")
    return complex(a_lambda_points(chi, lam, [zeta])[0])


@dataclass(frozen=True)
class AmplitudeA:
    """a_lam sampled on a dense zeta grid, with cubic interpolation; zero
    is returned beyond the grid (far outside the window support)."""

    lam: float
    delta: float
    zeta: np.ndarray
    values: np.ndarray

    def __call__(self, z):
        z = np.asarray(z, dtype=float)
        spline = self._spline()
        out = np.where(z <= self.zeta[-1], spline(np.clip(z, 0.0, self.zeta[-1])), 0.0)
        return complex(out) if out.ndim == 0 else out

    def _spline(self):
        if not hasattr(self, "_spl"):
            object.__setattr__(self, "_spl", CubicSpline(self.zeta, self.values))
        return self._spl

    @property
    def sup(self) -> float:
        return float(np.abs(self.values).max())


def make_amplitude(chi: ChiProfile, lam: float, zeta_max: float | None = None,
                   points_per_unit: float | None = None) -> AmplitudeA:
    if zeta_max is None:
        zeta_max = 6.0 * chi.delta
    n = int((points_per_unit or max(2000.0 / (6 * chi.delta), 4.0 * lam)) * zeta_max) + 16
    zg = np.linspace(0.0, zeta_max, n)
    vals = a_lambda_points(chi, lam, zg)
    return AmplitudeA(lam=lam, delta=chi.delta, zeta=zg, values=vals)


@dataclass(frozen=True)
class PointAmplitude:
    """a_lam evaluated exactly at one zeta; a cheap stand-in for the full
    table when a kernel formula only reads the amplitude at a single point
    (multiplier envelopes at large lambda)."""

    lam: float
    delta: float
    zeta0: float
    value: complex

    def __call__(self, z):
        z = np.asarray(z, dtype=float)
        if np.any(np.abs(z - self.zeta0) > 1e-9 * max(1.0, self.zeta0)):
            raise ValueError("point amplitude queried away from its anchor")
        out = np.full(z.shape, self.value, dtype=complex)
        return complex(out[()]) if out.ndim == 0 else out


def make_point_amplitude(chi: ChiProfile, lam: float, zeta0: float) -> PointAmplitude:
    return PointAmplitude(lam=lam, delta=chi.delta, zeta0=zeta0,
                          value=a_lambda(chi, lam, zeta0))


# ---------------------------------------------------------------------------
# plane cluster kernel (convolution form)
# ---------------------------------------------------------------------------

def r2_cluster_kernel(chi: ChiProfile, lam: float, z: float,
                      refine: float = 1.0) -> float:
    """Plane window kernel lam * int chi(tau) psi(tau/lam)
    J_0(|z|(lam - tau)) dtau as a function of z > 0, by quadrature in the
    rescaled variable u = tau/lam."""
    if lam < 10.0:
        raise DomainError(f"plane kernel defined for lam >= 10, got {lam}")
    if z <= 0.0:
        raise DomainError("z must be positive")
    tau, wt = _tau_rule(lam, z, chi.delta, refine)
    vals = chi.chi(lam * tau) * psi_bump(tau) * j0(z * lam * (1.0 - tau))
    return float(lam * lam * np.dot(wt, vals))


def r2_main_term(chi: ChiProfile, lam: float, z, amp: AmplitudeA | None = None):
    """Leading oscillatory part Re(lam e^{i lam z} a_lam(z)) of the plane
    kernel; the difference from r2_cluster_kernel is the remainder."""
    za = np.atleast_1d(np.asarray(z, dtype=float))
    av = amp(za) if amp is not None else a_lambda_points(chi, lam, za)
    out = np.real(lam * np.exp(1j * lam * za) * av)
    return float(out[0]) if np.isscalar(z) else out


# ---------------------------------------------------------------------------
# cone cluster kernels
# ---------------------------------------------------------------------------

def cone_geo_cluster_kernel(amp: AmplitudeA, r1: float, r2: float,
                            theta: float) -> complex:
    """Geometric cluster kernel 1_[-pi,pi](theta) e^{i lam G} a_lam(G)."""
    if abs(theta) > math.pi:
        return 0.0 + 0.0j
    g = chord(r1, r2, theta)
    return complex(np.exp(1j * amp.lam * g) * amp(g))


def _poisson_factor(s, rho: float, theta: float):
    return math.sin(theta / rho) / (np.cosh(s / rho) - math.cos(theta / rho))


def _diff_breaks(amp: AmplitudeA, rho, r1, r2, theta, refine: float):
    lam = amp.lam
    s_max_arg = ((amp.zeta[-1]) ** 2 - r1 * r1 - r2 * r2) / (2.0 * r1 * r2)
    s_hi = math.acosh(max(s_max_arg, 1.0))
    if s_hi == 0.0:
        return None
    sg = np.linspace(0.0, s_hi, 2049)
    ph = lam * (cone_D(r1, r2, sg) - (r1 + r2))
    n = int(refine * ph[-1] / 1.5) + 2
    targets = np.linspace(0.0, ph[-1], n + 1)
    breaks = sg[np.clip(np.searchsorted(ph, targets), 0, len(sg) - 1)]
    # resolve the conjugate-Poisson scale near s = 0 and the stationary scale
    u0 = abs(theta)
    extra = [u0 * f for f in (0.25, 0.5, 1.0, 2.0, 4.0)]
    sstar = (lam * r1 * r2) ** -0.5
    extra += [sstar * f for f in (0.5, 1.0, 2.0)]
    breaks = np.concatenate([breaks, [e for e in extra if 0.0 < e < s_hi],
                             [0.0, s_hi]])
    breaks = np.unique(breaks)
    return breaks[np.concatenate([[True], np.diff(breaks) > 1e-13])]


def diff_cluster_kernel(amp: AmplitudeA, rho: float, r1: float, r2: float,
                        theta: float, refine: float = 1.0,
                        n_gl: int = 16) -> complex:
    """Diffracted cluster kernel

        int_0^inf e^{i lam D(r1,r2,s)} sin(theta/rho) /
            (cosh(s/rho) - cos(theta/rho)) a_lam(D(r1,r2,s)) ds,

    by oscillation-adapted panels split at the stationary scale
    (lam r1 r2)^(-1/2); the amplitude support truncates the tail.
    """
    lam = amp.lam
    if not (r1 > 1.0 / lam and r2 > 1.0 / lam):
        raise RegimeError("radii must exceed 1/lambda")
    if max(r1, r2) >= 2.0 * amp.delta:
        raise RegimeError("radii must stay below 2 delta")
    u = theta / rho
    if abs(u - TWO_PI * round(u / TWO_PI)) < 1e-9:
        raise SingularConfigurationError(
            f"theta/rho = {u} is a multiple of 2 pi (singular angle)")
    breaks = _diff_breaks(amp, rho, r1, r2, theta, refine)
    if breaks is None:
        return 0.0 + 0.0j
    s, w = panel_nodes(breaks, n_gl)
    dd = cone_D(r1, r2, s)
    vals = np.exp(1j * lam * dd) * _poisson_factor(s, rho, theta) * amp(dd)
    return complex(np.dot(w, vals))


# ---------------------------------------------------------------------------
# the conjugate-Poisson approximation H and its multiplier
# ---------------------------------------------------------------------------

def _check_h_regime(amp: AmplitudeA, r1: float, r2: float):
    if not (r1 >= 1.0 / amp.lam and r2 >= 1.0 / amp.lam):
        raise RegimeError("radii must be >= 1/lambda")
    s = r1 + r2
    if not (0.5 * amp.delta < s < 2.0 * amp.delta):
        raise RegimeError(
            f"r1 + r2 = {s} outside the approximation regime "
            f"({0.5 * amp.delta}, {2.0 * amp.delta})")


def fresnel_poisson_integral(theta: float, mu: float, route: str = "closed"):
    """I(theta, mu) = int_0^inf e^{i mu s^2} theta/(s^2 + theta^2) ds.

    route="closed" evaluates (sqrt(pi)/2) conj(F(2 sqrt(mu) |theta|
    e^{i pi/4})) sgn(theta) through the ray function F; route="quadrature"
    integrates directly with an integration-by-parts tail.
    """
    if mu <= 0.0:
        raise DomainError("mu must be positive")
    if theta == 0.0:
        return 0.0 + 0.0j
    sgn = math.copysign(1.0, theta)
    th = abs(theta)
    if route == "closed":
        return sgn * 0.5 * SQRT_PI * np.conj(kummer_F(2.0 * math.sqrt(mu) * th))
    if route != "quadrature":
        raise ValueError(f"unknown route {route!r}")
    S = max(6.0 * th, math.sqrt(80.0 * math.pi / mu), 1.0)
    # oscillation panels: equal increments of mu s^2, plus the Poisson peak
    n_osc = int(mu * S * S / 1.5) + 2
    br = np.sqrt(np.linspace(0.0, S * S, n_osc + 1))
    br = np.unique(np.concatenate([br, [f * th for f in (0.25, 0.5, 1, 2, 4)], [0.0, S]]))
    br = br[br <= S]
    s, w = panel_nodes(br, 16)
    val = complex(np.dot(w, np.exp(1j * mu * s * s) * th / (s * s + th * th)))
    # tail by two integrations by parts against d(e^{i mu s^2})
    def h(x):
        return th / (x * x + th * th)

    def dh(x):
        return -2.0 * x * th / (x * x + th * th) ** 2

    e = np.exp(1j * mu * S * S)
    t1 = -e * h(S) / (2j * mu * S)
    t2 = (e / (2j * mu) ** 2) * (dh(S) / S - h(S) / S ** 2) / S
    return sgn * (val + t1 + t2)


def H_approx(amp: AmplitudeA, rho: float, r1: float, r2: float, theta: float,
             route: str = "closed") -> complex:
    """Conjugate-Poisson approximation

        H = 2 rho (r1+r2)^(1/2) a_lam(r1+r2)
              int_0^inf e^{i lam r1 r2 s^2} theta/(s^2+theta^2) ds
    """
    _check_h_regime(amp, r1, r2)
    mu = amp.lam * r1 * r2
    pref = 2.0 * rho * math.sqrt(r1 + r2) * amp(r1 + r2)
    return complex(pref * fresnel_poisson_integral(theta, mu, route=route))


def conjugate_poisson_multiplier(s: float, xi):
    """Symbol -i sgn(xi) e^{-s |xi|} of theta/(pi (s^2 + theta^2)),
    with sgn(0) = 0."""
    if s <= 0.0:
        raise DomainError("conjugate Poisson kernel requires s > 0")
    xa = np.atleast_1d(np.asarray(xi, dtype=float))
    out = -1j * np.sign(xa) * np.exp(-s * np.abs(xa))
    return complex(out[0]) if np.ndim(xi) == 0 else out.reshape(np.shape(xi))


def H_multiplier(amp: AmplitudeA, rho: float, r1: float, r2: float, xi):
    """Partial Fourier transform of H in theta:

        2 rho (r1+r2)^(1/2) sgn(xi) a_lam(r1+r2) (lam r1 r2)^(-1/2)
            e^{-i pi/4} F((lam r1 r2)^(-1/2) e^{i pi/4} |xi|).
    """
    mu = amp.lam * r1 * r2
    if mu <= 0.0:
        raise DomainError("lam * r1 * r2 must be positive")
    xi = np.asarray(xi, dtype=float)
    pref = (2.0 * rho * math.sqrt(r1 + r2) * amp(r1 + r2)
            / math.sqrt(mu) * np.exp(-0.25j * math.pi))
    flat = np.atleast_1d(xi)
    fv = np.array([kummer_F(abs(x) / math.sqrt(mu)) for x in flat.ravel()])
    out = pref * np.sign(flat.ravel()) * fv
    out = out.reshape(flat.shape)
    return complex(out[()]) if xi.ndim == 0 else out


def H_multiplier_khat(amp: AmplitudeA, rho: float, r1: float, r2: float, xi,
                      n_terms: int = 60):
    """Same multiplier through the termwise moment route: partial sums of
    sum_k ((-1)^k |xi|^k / k!) fresnel_moment(k, lam r1 r2), scaled to match
    the closed form (an independent evaluation path)."""
    mu = amp.lam * r1 * r2
    xi = np.asarray(xi, dtype=float)
    flat = np.atleast_1d(xi).ravel()
    acc = np.zeros(len(flat), dtype=complex)
    term = np.ones(len(flat), dtype=float)  # |xi|^k / k!
    ax = np.abs(flat)
    for k in range(n_terms):
        acc += ((-1) ** k) * term * fresnel_moment(k, mu)
        term = term * ax / (k + 1.0)
    pref = 2.0 * rho * math.sqrt(r1 + r2) * amp(r1 + r2) * (-2.0j)
    out = (pref * np.sign(flat) * acc).reshape(np.shape(xi))
    return complex(out[()]) if out.ndim == 0 else out


# ---------------------------------------------------------------------------
# Littlewood-Paley cutoffs and the block Sobolev bound
# ---------------------------------------------------------------------------

def _lp_theta(xi):
    """Smooth even cutoff: 1 on [-1, 1], 0 outside (-2, 2)."""
    return _smoothstep(np.abs(np.asarray(xi, dtype=float)) - 1.0)


def littlewood_paley(xi_grid, ell_max: int):
    """Cutoff arrays beta_0, ..., beta_{ell_max} on the grid:
    beta_0 = Theta(2 xi) and beta_ell(xi) = beta(2^{1-ell} xi) with
    beta = Theta(xi) - Theta(2 xi); they telescope to 1 wherever
    2^{1-ell_max}|xi| <= 1."""
    if ell_max < 1:
        raise DomainError("need ell_max >= 1")
    xi = np.asarray(xi_grid, dtype=float)
    out = [_lp_theta(2.0 * xi)]
    for ell in range(1, ell_max + 1):
        scaled = 2.0 ** (1 - ell) * xi
        out.append(_lp_theta(scaled) - _lp_theta(2.0 * scaled))
    return out


@dataclass(frozen=True)
class SobolevPieceReport:
    ell: int
    branch: str
    measured: float
    bound: float
    ratio: float


def sobolev_piece_bound(amp: AmplitudeA, rho: float, r1: float, r2: float,
                        ell: int, f_coeffs, dtheta: float = 0.02,
                        ell_max: int | None = None) -> SobolevPieceReport:
    """||H_ell * f||_6 against the block bound

        (lam r1 r2)^(-1/2) 2^(ell/3) ||beta_ell f||_2   if 2^ell <= sqrt(lam r1 r2)
        2^(-2 ell/3) ||beta_ell f||_2                   otherwise,

    on a periodic line grid (f given pointwise, spacing dtheta)."""
    if ell < 0:
        raise DomainError("ell must be >= 0")
    f = np.asarray(f_coeffs, dtype=complex)
    n = len(f)
    xi = 2.0 * math.pi * np.fft.fftfreq(n, dtheta)
    if ell_max is None:
        ell_max = max(ell + 1, int(math.ceil(math.log2(max(np.abs(xi).max(), 2.0)))) + 2)
    beta = littlewood_paley(xi, ell_max)[ell]
    hhat = H_multiplier(amp, rho, r1, r2, xi)
    fhat = np.fft.fft(f) * dtheta
    block = np.fft.ifft(beta * hhat * fhat) / dtheta
    measured = float((np.sum(np.abs(block) ** 6) * dtheta) ** (1.0 / 6.0))
    # Plancherel with d xi = 2 pi/(n dtheta): ||g||_2^2 = sum |g_hat|^2/(n dtheta)
    l2 = float(math.sqrt(np.sum(np.abs(beta * fhat) ** 2) / (n * dtheta)))
    mu = amp.lam * r1 * r2
    if 2.0 ** ell <= math.sqrt(mu):
        bound = mu ** -0.5 * 2.0 ** (ell / 3.0) * l2
        branch = "plateau"
    else:
        bound = 2.0 ** (-2.0 * ell / 3.0) * l2
        branch = "tail"
    ratio = measured / bound if bound > 0 else 0.0
    return SobolevPieceReport(ell=ell, branch=branch, measured=measured,
                              bound=bound, ratio=ratio)


# ---------------------------------------------------------------------------
# angular Young norms of the Poisson factor
# ---------------------------------------------------------------------------

def theta_young_envelope(s: float, rho: float, q: float) -> float:
    """Envelope s^(1/q - 1) for s < 1, e^(-s/rho) for s >= 1."""
    return s ** (1.0 / q - 1.0) if s < 1.0 else math.exp(-s / rho)


def theta_young_norm(s: float, rho: float, q: float) -> float:
    """L^q norm over the circle of circumference 2 pi rho of
    sin(theta/rho)/(cosh(s/rho) - cos(theta/rho))."""
    if s <= 0.0:
        raise DomainError("s must be positive")
    if q < 1.0:
        raise DomainError("q must be >= 1")
    v = s / rho
    # integrand peaks near u = +-v on the unit circle u = theta/rho
    lo_scale = min(max(v / 8.0, 1e-8), math.pi / 4)
    breaks = [0.0]
    w = lo_scale
    while w < math.pi:
        breaks.append(w)
        w *= 2.0
    breaks.append(math.pi)
    u, wu = panel_nodes(np.unique(breaks), 16)
    vals = np.abs(np.sin(u) / (math.cosh(v) - np.cos(u))) ** q
    return float((2.0 * rho * np.dot(wu, vals)) ** (1.0 / q))
