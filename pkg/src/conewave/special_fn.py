"""Special functions used throughout: Gamma, Bessel J of real order and its
zeros, the ray power series F driving the diffractive multiplier, and
Fresnel-type moment integrals.

F is the entire function

    F(z) = sum_k (-1)^k Gamma((k+1)/2) / k! * z^k,

evaluated on the ray arg(z) = pi/4.  Its even-index part sums to
sqrt(pi)*exp(z^2/4) in closed form; on the ray that factor is a pure
oscillation, and the odd part cancels it at infinity leaving
F(z) = 2/z - 4/z^3 + 24/z^5 - ...  The two parts individually reach size
exp(|z|^2/4), so the series branch runs on error-free-transformation
(double-double) compensated arithmetic; the large-|z| branch evaluates the
inverse-power expansion through its Stieltjes continued fraction, which
converges where the truncated expansion alone cannot reach 1e-6.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.optimize import brentq
from scipy.special import jv

from .errors import DomainError

SQRT_PI = 1.7724538509055159

# sqrt(pi) split into double-double limbs (hi + lo, exact to ~1e-33).
_SQRT_PI_DD = (1.772453850905516, -7.666586499825799e-17)

_SERIES_ASYMPTOTIC_SPLIT = 8.0  # |z| where the branches switch


def gamma(x: float) -> float:
    """Gamma function restricted to positive real arguments."""
    if not x > 0.0:
        raise DomainError(f"gamma requires x > 0, got {x}")
    return math.gamma(x)


def bessel_j(nu, x):
    """Bessel J_nu(x) for real order nu >= 0 and x >= 0.

    Accepts scalars or arrays in x.  Backed by scipy's Amos/Cephes
    implementation; the test suite checks it against an independent
    high-precision power-series oracle.
    """
    nu = float(nu)
    if nu < 0.0 or not math.isfinite(nu):
        raise DomainError(f"order must be finite and >= 0, got {nu}")
    xa = np.asarray(x, dtype=float)
    if np.any(xa < 0.0):
        raise DomainError("bessel_j requires x >= 0")
    out = jv(nu, xa)
    return float(out) if np.isscalar(x) or xa.ndim == 0 else out


# Zeros are reused heavily by the spectrum module; keep everything found so
# far, per order.  The cli module persists this table to disk.
_zero_table: dict[float, list[float]] = {}


def _scan_next_zero(nu: float, lo: float) -> float:
    """First zero of J_nu strictly above lo, by sign scan plus brentq.

    Consecutive zeros of J_nu are separated by more than 2.9, so a 0.35
    step cannot skip a sign change.
    """
    step = 0.35
    a = lo
    fa = jv(nu, a)
    while fa == 0.0:  # landed exactly on a zero; nudge off it
        a += 1e-9
        fa = jv(nu, a)
    for _ in range(100000):
        b = a + step
        fb = jv(nu, b)
        if fb == 0.0:
            b += 1e-9
            fb = jv(nu, b)
        if (fa > 0) != (fb > 0):
            return brentq(lambda t: jv(nu, t), a, b, xtol=1e-13, rtol=8.9e-16)
        a, fa = b, fb
    raise RuntimeError(f"zero scan for J_{nu} did not terminate from {lo}")


def bessel_zero(nu, m: int) -> float:
    """m-th positive zero j_{nu,m} of J_nu (m >= 1), to ~1e-12 absolute."""
    nu = float(nu)
    if nu < 0.0:
        raise DomainError(f"order must be >= 0, got {nu}")
    if m < 1 or int(m) != m:
        raise DomainError(f"zero index must be a positive integer, got {m}")
    m = int(m)
    zeros = _zero_table.setdefault(nu, [])
    while len(zeros) < m:
        if zeros:
            lo = zeros[-1] + 0.2
        else:
            # J_nu > 0 on (0, j_{nu,1}); start just above the order.
            lo = max(nu, 1e-6)
        zeros.append(_scan_next_zero(nu, lo))
    return zeros[m - 1]


def bessel_zeros_upto(nu, xmax: float) -> np.ndarray:
    """All zeros j_{nu,m} <= xmax, in increasing order."""
    nu = float(nu)
    zeros = _zero_table.setdefault(nu, [])
    if nu >= xmax:  # j_{nu,1} > nu, so nothing can qualify
        return np.empty(0)
    m = 1
    while True:
        z = bessel_zero(nu, m)
        if z > xmax:
            return np.array(zeros[: m - 1])
        m += 1


def seed_zero_table(entries) -> None:
    """Install externally persisted (nu, m, zero) triples (cache warm-up)."""
    by_nu: dict[float, dict[int, float]] = {}
    for nu, m, z in entries:
        by_nu.setdefault(float(nu), {})[int(m)] = float(z)
    for nu, zmap in by_nu.items():
        # accept only a gap-free prefix m = 1..M
        out = []
        m = 1
        while m in zmap:
            out.append(zmap[m])
            m += 1
        if out:
            have = _zero_table.setdefault(nu, [])
            if len(out) > len(have):
                have[:] = out


def zero_table_snapshot():
    """(nu, m, zero) triples for everything computed so far."""
    rows = []
    for nu in sorted(_zero_table):
        for i, z in enumerate(_zero_table[nu], start=1):
            rows.append((nu, i, z))
    return rows


@dataclass(frozen=True)
class KummerRayPoint:
    """Point z = magnitude * exp(i pi/4) on the fixed evaluation ray."""

    magnitude: float

    def __post_init__(self):
        if self.magnitude < 0.0 or not math.isfinite(self.magnitude):
            raise DomainError("ray magnitude must be finite and >= 0")

    @property
    def z(self) -> complex:
        m = self.magnitude
        return complex(m * math.sqrt(0.5), m * math.sqrt(0.5))


# ---------------------------------------------------------------------------
# double-double (compensated) arithmetic: exact error transformations
# ---------------------------------------------------------------------------

_SPLITTER = 134217729.0  # 2**27 + 1, Dekker splitting constant


def _two_sum(a: float, b: float):
    s = a + b
    bb = s - a
    err = (a - (s - bb)) + (b - bb)
    return s, err


def _two_prod(a: float, b: float):
    p = a * b
    ca = _SPLITTER * a
    ahi = ca - (ca - a)
    alo = a - ahi
    cb = _SPLITTER * b
    bhi = cb - (cb - b)
    blo = b - bhi
    err = ((ahi * bhi - p) + ahi * blo + alo * bhi) + alo * blo
    return p, err


def _dd_add(ah, al, bh, bl):
    s, e = _two_sum(ah, bh)
    e += al + bl
    hi, lo = _two_sum(s, e)
    return hi, lo


def _dd_mul(ah, al, bh, bl):
    p, e = _two_prod(ah, bh)
    e += ah * bl + al * bh
    hi, lo = _two_sum(p, e)
    return hi, lo


def _dd_div_float(ah, al, b):
    q1 = ah / b
    p, e = _two_prod(q1, b)
    r = ((ah - p) - e) + al
    q2 = r / b
    hi, lo = _two_sum(q1, q2)
    return hi, lo


# Unit phases (-1)^k e^{ik pi/4} for k mod 8, split into (re, im) with
# +-1, +-i exact and the diagonal entries sharing 1/sqrt(2).
_HALF_SQRT2 = math.sqrt(0.5)
_PHASE_SIGNS = {
    0: (1, 0, 0), 1: (-1, -1, 1), 2: (0, 1, 0), 3: (1, -1, 1),
    4: (-1, 0, 0), 5: (1, 1, 1), 6: (0, -1, 0), 7: (-1, 1, 1),
}  # (re_sign, im_sign, diagonal?)


def _kummer_series_dd(m: float) -> complex:
    """Split even/odd series of F at z = m e^{i pi/4}, compensated.

    Terms t_k = Gamma((k+1)/2)/k! * m^k are generated by the exact ratio
    t_{k+2} = t_k * m^2 / (2(k+2)) in double-double arithmetic and binned
    into the eight phase classes k mod 8; the O(exp(m^2/4)) cancellation
    between even and odd parts happens across the compensated bins.
    """
    msq_h, msq_l = _two_prod(m, m)
    acc = [(0.0, 0.0) for _ in range(8)]

    # t_0 = Gamma(1/2) m^0, t_1 = Gamma(1) m^1
    for start, t0 in ((0, _SQRT_PI_DD), (1, (m, 0.0))):  # even, odd chains
        th, tl = t0
        k = start
        while True:
            i = k % 8
            acc[i] = _dd_add(acc[i][0], acc[i][1], th, tl)
            if k > 2 + m * m / 2.0 and th < 1e-26:
                break
            if k > 4000:
                raise RuntimeError("kummer series did not terminate")
            th, tl = _dd_mul(th, tl, msq_h, msq_l)
            th, tl = _dd_div_float(th, tl, 2.0 * (k + 2.0))
            k += 2

    re_axis = (0.0, 0.0)
    im_axis = (0.0, 0.0)
    re_diag = (0.0, 0.0)
    im_diag = (0.0, 0.0)
    for i, (sh, sl) in enumerate(acc):
        rs, is_, diag = _PHASE_SIGNS[i]
        if diag:
            if rs:
                re_diag = _dd_add(*re_diag, rs * sh, rs * sl)
            if is_:
                im_diag = _dd_add(*im_diag, is_ * sh, is_ * sl)
        else:
            if rs:
                re_axis = _dd_add(*re_axis, rs * sh, rs * sl)
            if is_:
                im_axis = _dd_add(*im_axis, is_ * sh, is_ * sl)
    re = re_axis[0] + re_axis[1] + _HALF_SQRT2 * (re_diag[0] + re_diag[1])
    im = im_axis[0] + im_axis[1] + _HALF_SQRT2 * (im_diag[0] + im_diag[1])
    return complex(re, im)


def _kummer_cf(m: float) -> complex:
    """Large-|z| branch: the expansion 2/z - 4/z^3 + ... resummed as the
    Stieltjes continued fraction 1/(u+ (1/2)/(u+ 1/(u+ (3/2)/(u+ ...)))),
    u = z/2, whose convergents are the Pade approximants of that series.
    """
    u = complex(m * _HALF_SQRT2, m * _HALF_SQRT2) / 1.0
    u = 0.5 * u  # u = z/2 with z = m e^{i pi/4}
    tiny = 1e-300
    f = tiny
    c = f
    d = 0.0
    for n in range(1, 400):
        a = 1.0 if n == 1 else 0.5 * (n - 1)
        d = u + a * d
        if d == 0:
            d = tiny
        c = u + a / c
        if c == 0:
            c = tiny
        d = 1.0 / d
        delta = c * d
        f *= delta
        if abs(delta - 1.0) < 1e-16:
            return f
    raise RuntimeError(f"continued fraction for F did not converge at |z|={m}")


def kummer_even_part(m: float) -> complex:
    """Closed form sqrt(pi)*exp(z^2/4) of the even-index series on the ray."""
    return SQRT_PI * complex(math.cos(m * m / 4.0), math.sin(m * m / 4.0))


def _ray_magnitude(z) -> float:
    if isinstance(z, KummerRayPoint):
        return z.magnitude
    if isinstance(z, complex):
        m = abs(z)
        if m == 0.0:
            return 0.0
        if abs(z.real - z.imag) > 1e-12 * m or z.real < 0.0:
            raise DomainError(f"{z} is not on the ray arg(z) = pi/4")
        return m
    m = float(z)
    if m < 0.0:
        raise DomainError("ray magnitude must be >= 0")
    return m


def kummer_F(z) -> complex:
    """F(z) on the ray arg(z) = pi/4; input is a magnitude, a complex
    number on the ray, or a KummerRayPoint.  Magnitudes up to 200.
    """
    m = _ray_magnitude(z)
    if m > 200.0:
        raise DomainError(f"ray magnitude {m} exceeds the supported 200")
    if m <= _SERIES_ASYMPTOTIC_SPLIT:
        return _kummer_series_dd(m)
    return _kummer_cf(m)


def kummer_F_series(m: float) -> complex:
    """Series branch regardless of magnitude (overlap certification)."""
    return _kummer_series_dd(float(m))


def kummer_F_asymptotic(m: float) -> complex:
    """Asymptotic branch regardless of magnitude (overlap certification)."""
    return _kummer_cf(float(m))


def fresnel_moment(k: int, mu: float) -> complex:
    """Closed form of int_0^infty exp(i mu s^2) s^k ds:

        (1/2) Gamma((k+1)/2) exp(i pi (k+1)/4) mu^(-(k+1)/2).
    """
    if mu <= 0.0:
        raise DomainError(f"fresnel_moment requires mu > 0, got {mu}")
    if k < 0 or int(k) != k:
        raise DomainError(f"moment index must be a nonnegative integer, got {k}")
    half = 0.5 * (k + 1)
    phase = 0.25 * math.pi * (k + 1)
    return 0.5 * gamma(half) * mu ** (-half) * complex(math.cos(phase), math.sin(phase))
