"""Polygonal curve through the double sequence, one unit parameter interval per node."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np


class DomainError(ValueError):
    pass


@dataclass(frozen=True)
class Marker:
    s: float
    expected_angle: float
    side: str
    kind: str


def _check_domain(ts, lo, hi):
    ts = np.asarray(ts, dtype=np.float64)
    if ts.size and (np.any(~np.isfinite(ts)) or ts.min() < lo or ts.max() > hi):
        raise DomainError(f"parameter outside the domain [{lo}, {hi}]")
    return ts


class PolygonalCurve:
    """eta(t) = p_n + (t - n)(p_{n+1} - p_n) on [n, n+1]."""

    def __init__(self, seq):
        self.seq = seq
        self.nodes = np.asarray(seq.points)
        self.n_min = seq.n_min
        self.n_max = seq.n_max
        self.steps = np.diff(self.nodes)

    @property
    def domain(self):
        return (float(self.n_min), float(self.n_max))

    def _piece(self, ts):
        k = np.floor(ts).astype(np.int64) - self.n_min
        return np.clip(k, 0, len(self.steps) - 1)

    def evaluate(self, ts):
        """Values and derivatives at an array of parameters.

        At an integer the right derivative is returned, except at the right
        end of the domain where only the left one exists.
        """
        ts = _check_domain(ts, self.n_min, self.n_max)
        k = self._piece(ts)
        frac = ts - (k + self.n_min)
        d = self.steps[k]
        v = self.nodes[k] + frac * d
        # the last node is reached from the left piece; return it exactly
        v = np.where(ts == self.n_max, self.nodes[-1], v)
        return v, d

    def __call__(self, t):
        v, d = self.evaluate(np.array([t]))
        return complex(v[0]), complex(d[0])

    eval_with_derivative = __call__


def build_polygonal(seq):
    """Polygonal curve through seq plus the marker parameters (interval midpoints)."""
    curve = PolygonalCurve(seq)
    markers = [
        Marker(n + 0.5, 0.0 if kind == "H" else math.pi / 2, side, kind)
        for n, kind, side in seq.markers()
    ]
    return curve, markers


def eval_with_derivative(curve, t):
    return curve(t)
