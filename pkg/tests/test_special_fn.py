import math

import mpmath as mp
import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conewave.errors import DomainError
from conewave.quadrature import panel_nodes
from conewave.special_fn import (KummerRayPoint, SQRT_PI, bessel_j, bessel_zero,
                                 fresnel_moment, gamma, kummer_F,
                                 kummer_F_asymptotic, kummer_F_series)

J0_FIRST_ZERO = 2.404825557695773


# ---------------------------------------------------------------------------
# gamma
# ---------------------------------------------------------------------------

def test_gamma_half_is_sqrt_pi():
    assert gamma(0.5) == pytest.approx(math.sqrt(math.pi), rel=1e-15)


def test_gamma_factorial():
    assert gamma(5.0) == pytest.approx(24.0, rel=1e-15)


def test_gamma_duplication_at_1p3():
    x = 1.3
    lhs = gamma(x) * gamma(x + 0.5)
    rhs = 2.0 ** (1 - 2 * x) * math.sqrt(math.pi) * gamma(2 * x)
    assert abs(lhs - rhs) / abs(rhs) < 1e-12


def test_gamma_domain():
    with pytest.raises(DomainError):
        gamma(0.0)
    with pytest.raises(DomainError):
        gamma(-2.3)


@settings(max_examples=100, deadline=None)
@given(st.floats(min_value=0.1, max_value=10.0))
def test_gamma_duplication_identity(x):
    lhs = gamma(x) * gamma(x + 0.5)
    rhs = 2.0 ** (1 - 2 * x) * math.sqrt(math.pi) * gamma(2 * x)
    assert abs(lhs - rhs) <= 1e-12 * abs(rhs)


# ---------------------------------------------------------------------------
# bessel_j
# ---------------------------------------------------------------------------

def _series_j(nu, x, terms=120):
    """Independent ascending-series oracle (accurate for small arguments)."""
    total = 0.0
    for k in range(terms):
        total += (-1) ** k / (math.gamma(k + 1) * math.gamma(nu + k + 1)) \
            * (x / 2.0) ** (nu + 2 * k)
    return total


def test_bessel_j_at_zero():
    assert bessel_j(0, 0.0) == 1.0
    assert bessel_j(0.7, 0.0) == 0.0


def test_bessel_j_half_order_at_pi():
    # J_{1/2}(x) = sqrt(2/(pi x)) sin x vanishes at pi
    assert abs(bessel_j(0.5, math.pi)) < 1e-11


def test_bessel_j_against_series_oracle():
    for nu in (0.0, 0.5, 1.3, 4.0):
        for x in (0.1, 1.0, 4.0, 9.0):
            assert bessel_j(nu, x) == pytest.approx(_series_j(nu, x), abs=1e-12)


def test_bessel_j_against_mpmath_wide_range():
    mp.mp.dps = 30
    for nu in (0.0, 0.5, 7.0, 23.5, 50.0):
        for x in (0.5, 10.0, 57.0, 123.0, 200.0):
            ref = float(mp.besselj(nu, x))
            assert abs(bessel_j(nu, x) - ref) < 1e-11


def test_bessel_j_domain():
    with pytest.raises(DomainError):
        bessel_j(0.5, -1.0)
    with pytest.raises(DomainError):
        bessel_j(-0.5, 1.0)


def test_first_zero_of_j0_from_series_bisection():
    # independent oracle: bisect the power series
    lo, hi = 2.0, 3.0
    for _ in range(60):
        mid = 0.5 * (lo + hi)
        if _series_j(0.0, mid) > 0:
            lo = mid
        else:
            hi = mid
    assert abs(0.5 * (lo + hi) - J0_FIRST_ZERO) < 1e-12
    assert abs(bessel_j(0.0, J0_FIRST_ZERO)) < 1e-11


@settings(max_examples=60, deadline=None)
@given(st.floats(min_value=0.5, max_value=20.0),
       st.floats(min_value=0.5, max_value=60.0))
def test_bessel_three_term_recurrence(nu, x):
    lhs = bessel_j(nu - 0.5, x) + bessel_j(nu + 1.5, x)
    rhs = (2.0 * (nu + 0.5) / x) * bessel_j(nu + 0.5, x)
    assert abs(lhs - rhs) < 1e-9 * max(1.0, abs(rhs))


# ---------------------------------------------------------------------------
# bessel_zero
# ---------------------------------------------------------------------------

def test_half_order_zeros_are_multiples_of_pi():
    for m in range(1, 6):
        assert bessel_zero(0.5, m) == pytest.approx(m * math.pi, abs=1e-10)


def test_first_zero_j0():
    assert bessel_zero(0, 1) == pytest.approx(J0_FIRST_ZERO, abs=1e-10)


def test_zeros_match_mpmath():
    mp.mp.dps = 30
    for nu in (0.0, 0.4, 1.7, 13.0):
        for m in (1, 2, 7):
            assert abs(bessel_zero(nu, m) - float(mp.besseljzero(nu, m))) < 1e-10


def test_zero_interlacing():
    for nu in (0.0, 0.4, 1.7):
        for m in range(1, 11):
            assert bessel_zero(nu, m) < bessel_zero(nu + 1.0, m) < bessel_zero(nu, m + 1)


def test_zeros_strictly_increasing():
    zs = [bessel_zero(2.3, m) for m in range(1, 12)]
    assert all(a < b for a, b in zip(zs, zs[1:]))


def test_zero_domain():
    with pytest.raises(DomainError):
        bessel_zero(0.5, 0)
    with pytest.raises(DomainError):
        bessel_zero(-1.0, 1)


# ---------------------------------------------------------------------------
# kummer_F
# ---------------------------------------------------------------------------

def test_kummer_at_zero():
    assert kummer_F(0.0) == pytest.approx(SQRT_PI, rel=1e-14)


def test_kummer_accepts_ray_inputs():
    z = 3.0 * complex(math.sqrt(0.5), math.sqrt(0.5))
    assert kummer_F(z) == pytest.approx(kummer_F(3.0), rel=1e-14)
    assert kummer_F(KummerRayPoint(3.0)) == kummer_F(3.0)


def test_kummer_off_ray_rejected():
    with pytest.raises(DomainError):
        kummer_F(1.0 + 0.5j)
    with pytest.raises(DomainError):
        kummer_F(-2.0)
    with pytest.raises(DomainError):
        kummer_F(201.0)


def test_kummer_against_high_precision_partial_sums():
    # frozen 60-digit mpmath partial sums of the defining series
    frozen = {
        0.5: complex(1.4305327723837918115, -0.25720375450587385186),
        3.0: complex(0.50985148452146651584, -0.3592268282291253976),
        7.0: complex(0.20913003683660904639, -0.19301415272716682794),
    }
    for m, ref in frozen.items():
        assert abs(kummer_F(m) - ref) < 1e-13 * abs(ref)


def test_kummer_branch_overlap():
    # the branch switch at |z| = 8 is certified on [6, 10]
    for m in np.linspace(6.0, 10.0, 41):
        s = kummer_F_series(m)
        a = kummer_F_asymptotic(m)
        assert abs(s - a) <= 1e-6 * abs(s)


def test_kummer_tail():
    z50 = 50.0 * complex(math.sqrt(0.5), math.sqrt(0.5))
    assert abs(z50 * kummer_F(50.0) - 2.0) <= 0.1


def test_kummer_envelope_constant():
    ms = np.concatenate([[0.0], np.logspace(-3, 2, 400)])
    c_emp = max(abs(kummer_F(m)) * max(1.0, m) for m in ms)
    assert c_emp <= 10.0


def test_kummer_even_part_closed_form():
    from conewave.cluster_kernel import bump  # noqa: F401  (import sanity)
    from conewave.special_fn import kummer_even_part
    m = 5.0
    assert kummer_even_part(m) == pytest.approx(
        SQRT_PI * np.exp(1j * m * m / 4.0), rel=1e-14)


# ---------------------------------------------------------------------------
# fresnel_moment
# ---------------------------------------------------------------------------

def test_fresnel_k0():
    ref = 0.5 * math.sqrt(math.pi) * np.exp(0.25j * math.pi)
    assert fresnel_moment(0, 1.0) == pytest.approx(ref, rel=1e-14)


def test_fresnel_k1_elementary():
    for mu in (0.5, 3.0, 40.0):
        assert fresnel_moment(1, mu) == pytest.approx(1j / (2 * mu), rel=1e-14)


def _damped_moment(k, mu, eps):
    smax = math.sqrt(50.0 / eps)
    n = int(mu * smax * smax / 1.2) + 8
    br = np.sqrt(np.linspace(0.0, smax * smax, n + 1))
    s, w = panel_nodes(br, 12)
    return np.dot(w, np.exp((1j * mu - eps) * s * s) * s ** k)


def _fresnel_oracle(k, mu):
    """Gaussian-damped quadrature, Richardson-extrapolated to zero damping."""
    v = [_damped_moment(k, mu, mu / d) for d in (64.0, 128.0, 256.0)]
    v01 = 2 * v[1] - v[0]
    v12 = 2 * v[2] - v[1]
    return (4 * v12 - v01) / 3


@pytest.mark.parametrize("k,mu", [(0, 1.0), (1, 3.0), (2, 4.0), (3, 2.5),
                                  (4, 50.0), (4, 100.0)])
def test_fresnel_against_damped_quadrature(k, mu):
    closed = fresnel_moment(k, mu)
    oracle = _fresnel_oracle(k, mu)
    assert abs(closed - oracle) <= 1e-4 * abs(closed)


def test_fresnel_domain():
    with pytest.raises(DomainError):
        fresnel_moment(0, 0.0)
    with pytest.raises(DomainError):
        fresnel_moment(-1, 1.0)
