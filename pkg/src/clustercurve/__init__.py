"""Smooth regular curves with prescribed initial and terminal cluster sets on the Riemann sphere."""

from .kernels import BACKEND
from .sphere import INF, chordal_distance, hausdorff_chordal, parse_point
from .continuum import Circle, Custom, Polyline, Segment, Singleton, epsilon_chain, net_at
from .sequence import build_double_sequence, validate
from .curve import build_polygonal
from .smoothing import smooth_curve
from .approx import ErrorSchedule, PolynomialApproximant, certify, fit

__version__ = "0.1.0"

__all__ = [
    "BACKEND", "INF", "chordal_distance", "hausdorff_chordal", "parse_point",
    "Circle", "Custom", "Polyline", "Segment", "Singleton", "epsilon_chain", "net_at",
    "build_double_sequence", "validate", "build_polygonal", "smooth_curve",
    "ErrorSchedule", "PolynomialApproximant", "certify", "fit",
]
