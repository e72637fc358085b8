"""Spectral clusters and wave kernels on flat Euclidean cones.

Modules: special_fn (Gamma, Bessel, ray series, Fresnel moments),
cone_geom (chords, image angles, diffraction abbreviations), spectrum
(truncated-cone eigenbasis, window projectors, L^q norms, exponent fits),
wave_kernel (geometric and diffracted propagator parts, pairing checks),
cluster_kernel (smoothed projector kernels and multipliers), phase_lab
(stationary-phase certification), cli (experiment runner and caches).
"""

from .cone_geom import Cone, PolarPoint
from .spectrum import TruncatedCone, delta_exponent

__version__ = "0.1.0"

__all__ = ["Cone", "PolarPoint", "TruncatedCone", "delta_exponent",
           "__version__"]
