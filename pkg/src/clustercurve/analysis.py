"""Finite-scale checks on a constructed curve: tail images against target nets and tangent-argument behaviour at markers."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .approx import wrap_angle
from .curve import DomainError
from .sphere import hausdorff_chordal, to_array


class AnalysisError(ValueError):
    pass


class FunctionCurve:
    """Evaluable curve from a vectorized value function and its derivative."""

    def __init__(self, value, derivative, domain=(-math.inf, math.inf)):
        self.value = value
        self.derivative = derivative
        self.domain = domain

    def evaluate(self, ts):
        ts = np.asarray(ts, dtype=np.float64)
        lo, hi = self.domain
        if ts.size and (ts.min() < lo or ts.max() > hi):
            raise DomainError(f"parameter outside the domain [{lo}, {hi}]")
        return (np.asarray(self.value(ts), dtype=np.complex128) * np.ones(ts.shape),
                np.asarray(self.derivative(ts), dtype=np.complex128) * np.ones(ts.shape))

    def __call__(self, t):
        v, d = self.evaluate(np.array([t]))
        return complex(v[0]), complex(d[0])


@dataclass
class ClusterReport:
    window: tuple
    samples: int
    points: np.ndarray
    hausdorff_to_target: float
    level: int | None

    def to_json(self):
        return {
            "window": list(self.window),
            "samples": self.samples,
            "hausdorff_to_target": self.hausdorff_to_target,
            "level": self.level,
        }


def _target_cloud(target):
    pts = getattr(target, "points", target)
    if isinstance(pts, np.ndarray) and pts.dtype == np.complex128:
        return pts
    return to_array(list(pts))


def cluster_estimate(curve, window, samples, target):
    """Chordal Hausdorff distance from the image of a uniform window sample to ``target``.

    ``target`` is a NetLevel or any iterable of sphere points (INF allowed).
    """
    if samples < 16:
        raise ValueError("at least 16 samples are required")
    a, b = window
    if not a < b:
        raise ValueError("window must satisfy a < b")
    ts = np.linspace(a, b, samples)
    pts, _ = curve.evaluate(ts)
    cloud = _target_cloud(target)
    h = float(hausdorff_chordal(pts, cloud))
    return ClusterReport((float(a), float(b)), samples, pts, h, getattr(target, "j", None))


def unwrap_angles(raw):
    """Continuous lift of raw angles; raises when consecutive gaps are not clearly below pi."""
    raw = np.asarray(raw, dtype=np.float64)
    if len(raw) > 1:
        gaps = np.abs(wrap_angle(np.diff(raw)))
        if np.max(gaps) >= 0.9 * math.pi:
            k = int(np.argmax(gaps))
            raise AnalysisError(f"parameter spacing too coarse near sample {k}: refine the grid")
    return np.unwrap(raw)


def tangent_arg_profile(curve, ts):
    ts = np.asarray(ts, dtype=np.float64)
    if len(ts) > 1 and np.any(np.diff(ts) <= 0):
        raise ValueError("parameters must be strictly increasing")
    _, d = curve.evaluate(ts)
    if np.any(d == 0):
        raise AnalysisError("derivative vanishes on the grid")
    return unwrap_angles(np.angle(d))


@dataclass
class SideDivergence:
    side: str
    angles: list
    kinds: list
    params: list
    spread: float
    oscillations: int
    misaligned: int

    def to_json(self):
        return {
            "side": self.side,
            "markers": [{"s": s, "kind": k, "angle": a} for s, k, a in zip(self.params, self.kinds, self.angles)],
            "spread": self.spread,
            "oscillations": self.oscillations,
            "misaligned": self.misaligned,
        }


@dataclass
class DivergenceReport:
    tol: float
    sides: tuple
    passed: bool

    def to_json(self):
        return {"tol": self.tol, "passed": self.passed, "sides": [s.to_json() for s in self.sides]}


def _count_alternations(kinds):
    return sum(1 for a, b in zip(kinds, kinds[1:]) if a != b)


def _side_report(curve, markers, side, tol):
    ms = sorted((m for m in markers if m.side == side), key=lambda m: m.s)
    s = np.array([m.s for m in ms])
    _, d = curve.evaluate(s)
    ang = np.angle(d)
    errs = [float(abs(wrap_angle(a - m.expected_angle))) for m, a in zip(ms, ang)]
    good = [e <= tol for e in errs]
    # an alternation only counts between markers that actually sit at their angle
    kinds = [m.kind for m, g in zip(ms, good) if g]
    aligned = [a for a, g in zip(ang, good) if g]
    spread = float(max(aligned) - min(aligned)) if aligned else 0.0
    return SideDivergence(side, [float(a) for a in ang], [m.kind for m in ms], s.tolist(),
                          spread, _count_alternations(kinds), good.count(False))


def tangent_divergence_report(curve, markers, tol):
    """Pass iff every marker sits within tol of its angle and each side alternates H/V at least twice."""
    lo, hi = curve.domain
    inside = [m for m in markers if lo <= m.s <= hi]
    for side in ("minus", "plus"):
        for kind in ("H", "V"):
            if sum(1 for m in inside if m.side == side and m.kind == kind) < 2:
                raise AnalysisError(f"fewer than 2 {kind} markers on the {side} side inside the domain")
    sides = tuple(_side_report(curve, inside, side, tol) for side in ("minus", "plus"))
    passed = all(sd.misaligned == 0 and sd.oscillations >= 2 for sd in sides)
    return DivergenceReport(tol, sides, passed)


def block_window(seq, side, j):
    lo, hi = (seq.schedule_plus if side == "plus" else seq.schedule_minus)[j]
    return float(lo), float(hi)


def convergence_bound(j, N, eps_at):
    return 3.0 / j + 2.0 / N + 2.0 * eps_at


def block_reports(curve, seq, spec_minus, spec_plus, samples_per_unit=8, clip=None):
    """ClusterReport for every block window (optionally clipped to ``clip``), keyed by side and level."""
    from .continuum import net_at

    out = []
    for side, spec, sched in (("minus", spec_minus, seq.schedule_minus), ("plus", spec_plus, seq.schedule_plus)):
        for j in sorted(sched):
            a, b = block_window(seq, side, j)
            if clip is not None:
                a, b = max(a, clip[0]), min(b, clip[1])
                if b - a < 1:
                    continue
            n = max(16, int(samples_per_unit * (b - a)) + 1)
            rep = cluster_estimate(curve, (a, b), n, net_at(spec, j))
            out.append((side, j, rep))
    return out
