"""Exact Dirichlet eigenbasis of a truncated cone, spectral-window
projectors, L^q norms, and the scaling-exponent experiments.

Separating variables on the cone (radius rho, Dirichlet wall at r = R)
gives eigenfunctions

    phi_{k,m}(r, theta) = N * J_nu(j_{nu,m} r / R) * exp(i k theta / rho),
    nu = |k| / rho,   lambda_{k,m} = j_{nu,m} / R,

orthonormal in L^2(r dr dtheta).  A cluster window [lambda0, lambda0 + w]
collects every mode whose frequency lies in the closed interval.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import brentq
from scipy.special import jv

from .cone_geom import Cone
from .errors import DomainError, InsufficientDataError, ResolutionError
from .special_fn import bessel_zeros_upto

MIN_ZERO_GAP = 2.9  # consecutive zeros of any J_nu are farther apart


def delta_exponent(q) -> float:
    """Sharp cluster-norm exponent: (1/2)(1/2 - 1/q) for 2 <= q <= 6,
    2(1/2 - 1/q) - 1/2 for q >= 6 (q = inf gives 1/2)."""
    if q == math.inf:
        return 0.5
    q = float(q)
    if q < 2.0:
        raise DomainError(f"exponent defined for q >= 2, got {q}")
    if q <= 6.0:
        return 0.5 * (0.5 - 1.0 / q)
    return 2.0 * (0.5 - 1.0 / q) - 0.5


@dataclass(frozen=True)
class TruncatedCone:
    """Cone truncated at r = R with a Dirichlet wall (discrete spectrum)."""

    cone: Cone
    R: float = 1.0

    def __post_init__(self):
        if not self.R > 0.0:
            raise ValueError(f"truncation radius must be positive, got {self.R}")

    @property
    def rho(self) -> float:
        return self.cone.rho

    @property
    def area(self) -> float:
        return math.pi * self.rho * self.R * self.R


@dataclass(frozen=True)
class EigenMode:
    k: int
    m: int
    nu: float
    lam: float
    norm_const: float

    def radial(self, r):
        """Radial factor norm_const * J_nu(lam * r)."""
        return self.norm_const * jv(self.nu, self.lam * np.asarray(r, dtype=float))

    def values(self, r, theta, rho: float):
        rr, tt = np.broadcast_arrays(np.asarray(r, float), np.asarray(theta, float))
        return self.radial(rr) * np.exp(1j * self.k * tt / rho)


def _mode(tc: TruncatedCone, k: int, j: float) -> EigenMode:
    nu = abs(k) / tc.rho
    lam = j / tc.R
    norm = 1.0 / (tc.R * math.sqrt(math.pi * tc.rho) * abs(jv(nu + 1.0, j)))
    return EigenMode(k=k, m=0, nu=nu, lam=lam, norm_const=norm)


def build_basis(tc: TruncatedCone, lambda_max: float) -> list[EigenMode]:
    """All modes with lambda <= lambda_max, sorted by (lambda, k, m)."""
    if not lambda_max > 0.0:
        raise DomainError("lambda_max must be positive")
    xmax = lambda_max * tc.R
    modes: list[EigenMode] = []
    k = 0
    while True:
        nu = k / tc.rho
        if nu >= xmax:  # j_{nu,1} > nu, no zeros can qualify
            break
        zeros = bessel_zeros_upto(nu, xmax)
        if zeros.size == 0 and k > 0:
            break
        for m, j in enumerate(zeros, start=1):
            base = _mode(tc, k, j)
            for sk in ({0} if k == 0 else {k, -k}):
                modes.append(EigenMode(sk, m, base.nu, base.lam, base.norm_const))
        k += 1
    modes.sort(key=lambda md: (md.lam, md.k, md.m))
    return modes


@dataclass(frozen=True)
class ClusterWindow:
    lambda0: float
    width: float
    modes: tuple[EigenMode, ...]

    @property
    def max_abs_k(self) -> int:
        return max((abs(md.k) for md in self.modes), default=0)

    @property
    def max_j(self) -> float:
        return max((md.lam for md in self.modes), default=1.0)


def window_modes(tc: TruncatedCone, lambda0: float, width: float = 1.0) -> ClusterWindow:
    """Every mode with lambda in the closed window [lambda0, lambda0+width].

    For width < 2.9/R a single sign test per order suffices because a
    width-R interval can hold at most one zero of each J_nu; wider windows
    fall back to full enumeration.
    """
    a, b = lambda0 * tc.R, (lambda0 + width) * tc.R
    modes: list[EigenMode] = []
    if b - a >= MIN_ZERO_GAP:
        for md in build_basis(tc, lambda0 + width):
            if lambda0 <= md.lam <= lambda0 + width:
                modes.append(md)
        return ClusterWindow(lambda0, width, tuple(modes))
    k = 0
    while True:
        nu = k / tc.rho
        if nu >= b:
            break
        fa, fb = jv(nu, a), jv(nu, b)
        j = None
        if fa == 0.0:
            j = a
        elif fb == 0.0:
            j = b
        elif (fa > 0) != (fb > 0):
            j = brentq(lambda t: jv(nu, t), a, b, xtol=1e-13, rtol=8.9e-16)
        if j is not None:
            mprev = bessel_zeros_upto(nu, a - 1e-9).size
            base = _mode(tc, k, j)
            for sk in ({0} if k == 0 else {k, -k}):
                modes.append(EigenMode(sk, mprev + 1, base.nu, base.lam,
                                       base.norm_const))
        k += 1
    modes.sort(key=lambda md: (md.lam, md.k, md.m))
    return ClusterWindow(lambda0, width, tuple(modes))


def weyl_main_term(tc: TruncatedCone, lam: float) -> float:
    """Leading eigenvalue count (Area/4pi) lambda^2 = rho R^2 lambda^2 / 4."""
    return tc.rho * tc.R * tc.R * lam * lam / 4.0


# ---------------------------------------------------------------------------
# grids, projection, norms
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class PolarGrid:
    """Gauss-Legendre radial nodes on [0, R] x uniform angular nodes."""

    rho: float
    R: float
    r: np.ndarray
    wr: np.ndarray
    theta: np.ndarray

    @property
    def n_theta(self) -> int:
        return len(self.theta)

    @property
    def dtheta(self) -> float:
        return 2.0 * math.pi * self.rho / self.n_theta

    @classmethod
    def build(cls, tc: TruncatedCone, n_r: int, n_theta: int) -> "PolarGrid":
        from .quadrature import gauss_legendre
        r, wr = gauss_legendre(0.0, tc.R, n_r)
        theta = np.arange(n_theta) * (2.0 * math.pi * tc.rho / n_theta)
        return cls(rho=tc.rho, R=tc.R, r=r, wr=wr, theta=theta)

    @classmethod
    def for_window(cls, tc: TruncatedCone, window: ClusterWindow,
                   refine: float = 1.0) -> "PolarGrid":
        # 4 points per fastest oscillation in each direction, plus margin
        n_theta = int(refine * (4 * window.max_abs_k + 16))
        n_r = int(refine * (4.0 * window.max_j * tc.R / math.pi + 32))
        return cls.build(tc, n_r, n_theta)

    def cell_measure(self) -> np.ndarray:
        """Quadrature weights r*wr*dtheta as an (n_r, n_theta) array."""
        return (self.wr * self.r)[:, None] * np.full(self.n_theta, self.dtheta)


def _check_resolution(window: ClusterWindow, grid: PolarGrid) -> None:
    if grid.n_theta <= 2 * window.max_abs_k:
        raise ResolutionError(
            f"angular grid {grid.n_theta} cannot resolve |k| up to "
            f"{window.max_abs_k}")


def project(window: ClusterWindow, samples: np.ndarray, grid: PolarGrid) -> np.ndarray:
    """Coefficients <f, phi_j> of grid samples against the window modes."""
    _check_resolution(window, grid)
    samples = np.asarray(samples)
    if samples.shape != (len(grid.r), grid.n_theta):
        raise ValueError("samples must be laid out on the (r, theta) grid")
    # uniform-angle quadrature of e^{-ik theta/rho} is an FFT bin
    fhat = np.fft.fft(samples, axis=1) * (grid.dtheta)
    radial_weight = grid.wr * grid.r
    coeffs = np.empty(len(window.modes), dtype=complex)
    for i, md in enumerate(window.modes):
        prof = md.radial(grid.r)
        coeffs[i] = np.sum(radial_weight * prof * fhat[:, md.k % grid.n_theta])
    return coeffs


def reconstruct(window: ClusterWindow, coeffs: np.ndarray, grid: PolarGrid) -> np.ndarray:
    """Sample sum_j c_j phi_j on the grid."""
    _check_resolution(window, grid)
    return _synth(window, grid, _radial_matrix(window, grid),
                  np.asarray(coeffs, dtype=complex))


def apply_projector(window: ClusterWindow, samples: np.ndarray, grid: PolarGrid):
    """Pi_lambda f on the grid, plus its coefficient vector."""
    coeffs = project(window, samples, grid)
    return reconstruct(window, coeffs, grid), coeffs


def lq_norm(samples: np.ndarray, grid: PolarGrid, q, refined=None) -> float:
    """L^q norm against r dr dtheta; q = inf is a grid max, Richardson
    extrapolated when a refined (samples, grid) pair is supplied."""
    a = np.abs(np.asarray(samples))
    if q == math.inf:
        m1 = float(a.max())
        if refined is None:
            return m1
        m2 = float(np.abs(np.asarray(refined[0])).max())
        return m2 + (m2 - m1) / 3.0
    q = float(q)
    if q not in (2.0, 4.0, 6.0):
        raise DomainError(f"supported exponents are 2, 4, 6, inf; got {q}")
    val = np.sum(grid.cell_measure() * a ** q)
    return float(val ** (1.0 / q))


def cluster_sup_operator_norm(window: ClusterWindow, grid: PolarGrid,
                              refine: int = 4) -> float:
    """Exact 2->inf norm sup_x (sum_j |phi_j(x)|^2)^(1/2), up to radial
    resolution.  The square sum has no angular dependence, so the sup is a
    dense 1-d radial max."""
    if not window.modes:
        return 0.0
    r_dense = np.linspace(0.0, grid.R, refine * max(len(grid.r), 128) + 1)
    r_all = np.union1d(r_dense, grid.r)
    total = np.zeros_like(r_all)
    for md in window.modes:
        total += md.radial(r_all) ** 2
    return float(np.sqrt(total.max()))


def _radial_matrix(window: ClusterWindow, grid: PolarGrid) -> np.ndarray:
    """Stacked radial profiles norm_j * J_nu(lam_j r) on the grid radii."""
    return np.stack([md.radial(grid.r) for md in window.modes])


def _synth(window: ClusterWindow, grid: PolarGrid, radmat: np.ndarray,
           coeffs: np.ndarray) -> np.ndarray:
    spec = np.zeros((len(grid.r), grid.n_theta), dtype=complex)
    for i, md in enumerate(window.modes):
        spec[:, md.k % grid.n_theta] += coeffs[i] * radmat[i]
    return np.fft.ifft(spec, axis=1) * grid.n_theta


def lower_bound_2_to_q(window: ClusterWindow, q=6, trials: int = 16,
                       seed: int = 0, grid: PolarGrid | None = None,
                       tc: TruncatedCone | None = None) -> float:
    """Best ratio ||Pi f||_q / ||f||_2 over a candidate family: random
    Gaussian coefficients, single modes, and coherent states matched to
    sampled points (coefficients conj(phi_j(x0)))."""
    if trials < 1:
        raise DomainError("need at least one trial")
    if float(q) != 6.0:
        raise DomainError("lower bound measurement is specified for q = 6")
    if not window.modes:
        return 0.0
    if grid is None:
        if tc is None:
            raise ValueError("pass a grid or the truncated cone to size one")
        grid = PolarGrid.for_window(tc, window)
    rng = np.random.default_rng(seed)
    n = len(window.modes)
    radmat = _radial_matrix(window, grid)

    # single modes: |phi_j| has no angular dependence, so the ratio
    # ||phi_j||_6 is a purely radial quadrature
    radial_weight = grid.wr * grid.r
    circ = 2.0 * math.pi * grid.rho
    best = float(np.max(
        (circ * np.sum(radial_weight * np.abs(radmat) ** 6, axis=1)) ** (1.0 / 6.0)))

    candidates = []
    for _ in range(trials):
        candidates.append(rng.standard_normal(n) + 1j * rng.standard_normal(n))
    # coherent states focused at the tip, at generic radii, and at random
    # points: Cauchy-Schwarz makes these the pointwise-optimal inputs
    focus_r = [0.0, 0.25 * grid.R, 0.5 * grid.R, 0.8 * grid.R]
    focus_r += list(rng.uniform(0.0, grid.R, size=min(8, trials)))
    for r0 in focus_r:
        th0 = rng.uniform(0.0, circ)
        c = np.array([np.conj(md.values(r0, th0, grid.rho)) for md in window.modes])
        if np.linalg.norm(c) > 0:
            candidates.append(c)

    for c in candidates:
        c = np.asarray(c, dtype=complex)
        nrm = np.linalg.norm(c)
        if nrm == 0.0:
            continue
        g = _synth(window, grid, radmat, c / nrm)
        best = max(best, lq_norm(g, grid, q))
    return best


def fit_scaling_exponent(rows) -> tuple[float, float, float]:
    """Least-squares slope/intercept/residual of log(norm) vs log(lambda)."""
    rows = list(rows)
    if len(rows) < 4:
        raise InsufficientDataError(f"need >= 4 rows, got {len(rows)}")
    lam = np.array([r[0] for r in rows], dtype=float)
    if np.any(np.diff(lam) <= 0):
        raise InsufficientDataError("lambda values must be strictly increasing")
    val = np.array([r[1] for r in rows], dtype=float)
    lx, ly = np.log(lam), np.log(val)
    slope, intercept = np.polyfit(lx, ly, 1)
    resid = float(np.sqrt(np.mean((ly - (slope * lx + intercept)) ** 2)))
    return float(slope), float(intercept), resid


# ---------------------------------------------------------------------------
# sector <-> cone correspondence
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class SectorReport:
    alpha: float
    rho: float
    lambda_max: float
    sector: tuple[float, ...]
    cone_odd: tuple[float, ...]
    max_abs_diff: float
    matched: bool


def sector_correspondence_check(alpha: float, lambda_max: float, R: float = 1.0,
                                tol: float = 1e-9) -> SectorReport:
    """Dirichlet eigenfrequencies of the circular sector of opening alpha
    (orders n*pi/alpha, n >= 1) against the odd-symmetry (k != 0, sine)
    half of the truncated-cone spectrum at rho = alpha/pi."""
    if not (0.0 < alpha < 2.0 * math.pi):
        raise DomainError(f"sector opening must lie in (0, 2 pi), got {alpha}")
    sector: list[float] = []
    n = 1
    while True:
        nu = n * math.pi / alpha
        if nu >= lambda_max * R:
            break
        zs = bessel_zeros_upto(nu, lambda_max * R)
        sector.extend(z / R for z in zs)
        if zs.size == 0:
            break
        n += 1
    sector.sort()

    tc = TruncatedCone(Cone(alpha / math.pi), R)
    cone_odd = sorted(md.lam for md in build_basis(tc, lambda_max) if md.k >= 1)

    n_common = min(len(sector), len(cone_odd))
    diffs = [abs(a - b) for a, b in zip(sector[:n_common], cone_odd[:n_common])]
    max_diff = max(diffs, default=0.0)
    matched = (len(sector) == len(cone_odd)) and max_diff <= tol
    return SectorReport(alpha=alpha, rho=alpha / math.pi, lambda_max=lambda_max,
                        sector=tuple(sector), cone_odd=tuple(cone_odd),
                        max_abs_diff=max_diff, matched=matched)


# ---------------------------------------------------------------------------
# mode tables as CSV (cli interchange format)
# ---------------------------------------------------------------------------

def modes_to_csv(modes, path) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["k", "m", "nu", "lambda", "norm_const"])
        for md in modes:
            w.writerow([md.k, md.m, f"{md.nu:.17g}", f"{md.lam:.17g}",
                        f"{md.norm_const:.17g}"])


def modes_from_csv(path) -> list[EigenMode]:
    out = []
    with open(path, newline="") as fh:
        for row in csv.DictReader(fh):
            out.append(EigenMode(k=int(row["k"]), m=int(row["m"]),
                                 nu=float(row["nu"]), lam=float(row["lambda"]),
                                 norm_const=float(row["norm_const"])))
    return out
