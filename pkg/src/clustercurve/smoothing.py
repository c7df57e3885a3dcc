"""C^1 corner smoothing of the polygonal curve.

Each interior node ``n`` gets a window ``[n - delta_n, n + delta_n]`` on
which the two adjacent linear pieces are replaced by the two-point Hermite
cubic that matches value and derivative of the incoming line at the left
edge and of the outgoing line at the right edge.  With these data the cubic
term vanishes and the blend is

    sigma(t) = eta(t) + delta_n * min(u, 1-u)^2 * (d2 - d1),
    sigma'(t) = (1 - u) d1 + u d2,          u = (t - n + delta_n) / (2 delta_n),

so sigma' runs along the straight segment from d1 to d2 and never meets 0
unless d1 and d2 point in opposite directions.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .curve import DomainError, _check_domain

DELTA_CAP = 0.25


@dataclass(frozen=True)
class CornerBlend:
    n: int
    delta: float
    d1: complex
    d2: complex
    z: complex

    def __post_init__(self):
        if not 0.0 < self.delta < 0.5:
            raise ValueError(f"blend half-width must lie in (0, 1/2), got {self.delta}")
        cross = (self.d1.conjugate() * self.d2)
        if cross.imag == 0.0 and cross.real < 0.0:
            raise ValueError("incoming and outgoing directions are antiparallel")


def smooth_corner(blend, t):
    """Value and derivative of the corner blend at t in its window."""
    n, dl = blend.n, blend.delta
    if not (n - dl <= t <= n + dl):
        raise DomainError(f"t={t} is outside the blend window [{n - dl}, {n + dl}]")
    u = (t - n + dl) / (2 * dl)
    d1, d2 = blend.d1, blend.d2
    if t < n:
        v = blend.z + (t - n) * d1 + dl * u * u * (d2 - d1)
    else:
        v = blend.z + (t - n) * d2 + dl * (1 - u) * (1 - u) * (d2 - d1)
    return v, (1 - u) * d1 + u * d2


def choose_delta(n, budget, d1, d2):
    """Half-width keeping the blend within ``budget`` of the corner: min(1/4, budget/(|d1|+|d2|))."""
    if budget <= 0:
        raise ValueError("budget must be positive")
    return min(DELTA_CAP, budget / (abs(d1) + abs(d2)))


def interval_budget(n):
    """Allowed sup |sigma - eta| on [n, n+1]."""
    return 1.0 / (abs(n) + 1)


class SmoothCurve:
    def __init__(self, base):
        self.base = base
        self.n_min, self.n_max = base.n_min, base.n_max
        nodes, steps = base.nodes, base.steps
        interior = np.arange(self.n_min + 1, self.n_max)
        k = interior - self.n_min
        d1, d2 = steps[k - 1], steps[k]
        # a corner perturbs both neighbouring intervals
        budget = np.minimum(1.0 / (np.abs(interior - 1) + 1), 1.0 / (np.abs(interior) + 1))
        delta = np.minimum(DELTA_CAP, budget / (np.abs(d1) + np.abs(d2)))
        self._delta = np.zeros(len(nodes))
        self._delta[k] = delta
        self._d1 = np.zeros(len(nodes), dtype=np.complex128)
        self._d2 = np.zeros(len(nodes), dtype=np.complex128)
        self._d1[k], self._d2[k] = d1, d2
        self.blends = tuple(
            CornerBlend(int(n), float(dl), complex(a), complex(b), complex(nodes[i]))
            for n, i, dl, a, b in zip(interior, k, delta, d1, d2)
        )

    @property
    def domain(self):
        return self.base.domain

    def blend_at(self, n):
        return self.blends[n - self.n_min - 1]

    def evaluate(self, ts):
        ts = _check_domain(ts, self.n_min, self.n_max)
        v, d = self.base.evaluate(ts)
        v, d = v.copy(), d.copy()
        k = np.rint(ts).astype(np.int64) - self.n_min
        dl = self._delta[k]
        inside = (dl > 0) & (np.abs(ts - (k + self.n_min)) <= dl)
        if np.any(inside):
            ti, ki, di = ts[inside], k[inside], dl[inside]
            u = (ti - (ki + self.n_min) + di) / (2 * di)
            d1, d2 = self._d1[ki], self._d2[ki]
            w = np.minimum(u, 1 - u)
            v[inside] += di * w * w * (d2 - d1)
            d[inside] = (1 - u) * d1 + u * d2
        return v, d

    def __call__(self, t):
        v, d = self.evaluate(np.array([t]))
        return complex(v[0]), complex(d[0])


def smooth_curve(base):
    return SmoothCurve(base)


def eval_smooth(curve, t):
    return curve(t)
