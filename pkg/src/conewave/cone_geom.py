"""Geometry of the flat cone: chords, image angles, and the abbreviations
entering the diffracted wave kernel.

The cone of radius rho is R_+ x (R / 2*pi*rho Z) with metric
dr^2 + r^2 dtheta^2; away from the tip it is flat, so distances between
points whose angular separation (mod 2*pi*rho) lands in [-pi, pi] are
planar chords.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import RegimeError


@dataclass(frozen=True)
class Cone:
    """Flat cone parameterised by rho > 0 (circumference 2*pi*rho)."""

    rho: float

    def __post_init__(self):
        if not (self.rho > 0.0 and math.isfinite(self.rho)):
            raise ValueError(f"cone radius must be positive, got {self.rho}")

    @property
    def circumference(self) -> float:
        return 2.0 * math.pi * self.rho

    def reduce_angle(self, theta: float) -> float:
        """Reduce an angle to the canonical range (-pi*rho, pi*rho]."""
        c = self.circumference
        t = math.fmod(theta, c)
        if t > 0.5 * c:
            t -= c
        elif t <= -0.5 * c:
            t += c
        return t

    def point(self, r: float, theta: float) -> "PolarPoint":
        return PolarPoint(r, self.reduce_angle(theta))


@dataclass(frozen=True)
class PolarPoint:
    """Point (r, theta) on the cone; r is the distance to the tip."""

    r: float
    theta: float

    def __post_init__(self):
        if self.r < 0.0:
            raise ValueError(f"radius must be >= 0, got {self.r}")


@dataclass(frozen=True)
class DiffractionGeometry:
    """Abbreviations of the diffracted kernel at (t, r1, r2, theta1-theta2):

    alpha = (t^2 - r1^2 - r2^2) / (2 r1 r2),  beta = arccosh(alpha),
    phi1 = (pi + dtheta)/rho,  phi2 = (pi - dtheta)/rho.
    """

    alpha: float
    beta: float
    phi1: float
    phi2: float


def chord(r1: float, r2: float, theta) -> float:
    """Planar chord length (r1^2 + r2^2 - 2 r1 r2 cos theta)^(1/2)."""
    val = r1 * r1 + r2 * r2 - 2.0 * r1 * r2 * np.cos(theta)
    # tiny negative values can appear at coincident points
    return np.sqrt(np.maximum(val, 0.0))


def image_angles(theta1: float, theta2: float, cone: Cone) -> list[float]:
    """All values (theta1 - theta2) + j*2*pi*rho inside the closed window
    [-pi, pi]; these index the straight-line images contributing to the
    geometric kernel.  Both endpoints are kept on ties.
    """
    dt = theta1 - theta2
    c = cone.circumference
    j_lo = math.ceil((-math.pi - dt) / c)
    j_hi = math.floor((math.pi - dt) / c)
    return [dt + j * c for j in range(j_lo, j_hi + 1)]


def diffraction_geometry(t: float, r1: float, r2: float, theta_diff: float,
                         cone: Cone) -> DiffractionGeometry:
    """Diffraction abbreviations; only defined in the regime t >= r1 + r2."""
    if r1 <= 0.0 or r2 <= 0.0:
        raise ValueError("diffraction geometry requires r1, r2 > 0")
    if t < r1 + r2:
        raise RegimeError(
            f"t={t} < r1+r2={r1 + r2}: the diffracted kernel vanishes there")
    alpha = (t * t - r1 * r1 - r2 * r2) / (2.0 * r1 * r2)
    alpha = max(alpha, 1.0)  # clip roundoff at the support boundary
    beta = math.acosh(alpha)
    phi1 = (math.pi + theta_diff) / cone.rho
    phi2 = (math.pi - theta_diff) / cone.rho
    return DiffractionGeometry(alpha=alpha, beta=beta, phi1=phi1, phi2=phi2)


def D(r1: float, r2: float, s) -> float:
    """Diffracted-phase distance (r1^2 + r2^2 + 2 r1 r2 cosh s)^(1/2).

    Increasing in s >= 0 with D(r1, r2, 0) = r1 + r2; its s-derivative
    r1 r2 sinh(s)/D never vanishes for s > 0, which is what makes the
    large-s tail of the diffracted kernel non-stationary.
    """
    return np.sqrt(r1 * r1 + r2 * r2 + 2.0 * r1 * r2 * np.cosh(s))


def dD_ds(r1: float, r2: float, s):
    """s-derivative of D."""
    return r1 * r2 * np.sinh(s) / D(r1, r2, s)


def chord_dtheta(r1: float, r2: float, theta):
    """Exact d/dtheta of the chord: r1 r2 sin(theta) / chord."""
    return r1 * r2 * np.sin(theta) / chord(r1, r2, theta)


def chord_dtheta2(r1: float, r2: float, theta):
    """Exact second theta-derivative of the chord."""
    g = chord(r1, r2, theta)
    s = r1 * r2 * np.sin(theta)
    return r1 * r2 * np.cos(theta) / g - s * s / g ** 3
