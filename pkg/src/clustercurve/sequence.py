"""Truncated double sequence p_n whose two tails cluster on K- and K+.

Each side is built block by block.  Block ``j`` sweeps every point of the
level-``j`` net (depth-first order over the safe-edge proximity graph),
moving between sweep targets along epsilon-chains, and drops a short
horizontal or vertical *marker* segment next to every target it reaches.
Degenerate continua have no useful net, so their block ``j`` circles a
single target ``z_j`` converging to the point instead.

Step ``n -> n+1`` is bounded chordally by ``1/j`` where ``j`` is the label
of the point the step departs from in construction order.
"""

from __future__ import annotations

import cmath
import math
import random
from dataclasses import dataclass, field

import numpy as np

from .continuum import Singleton, net_at, safe_edge, shortest_index_path
from .sphere import INF, chordal_distance

COLLINEAR_TOL = 1e-9
_BUILD_COLLINEAR_TOL = 1e-6
_MAX_SUBDIVISION = 4096


class SequenceError(ValueError):
    pass


def collinearity_residual(a, b, c):
    """|Im((b-a) conj(c-b))| / (|b-a||c-b|); 0 for collinear or degenerate triples."""
    u, v = b - a, c - b
    den = abs(u) * abs(v)
    if den == 0.0:
        return 0.0
    return abs((u * v.conjugate()).imag) / den


def _rotations():
    out = [0.0]
    for k in range(1, 12):
        out += [k * math.pi / 12, -k * math.pi / 12]
    return out + [math.pi]


_ROTATIONS = [cmath.exp(1j * a) for a in _rotations()]


@dataclass
class HalfSequence:
    side: str
    points: list = field(default_factory=list)
    labels: list = field(default_factory=list)
    protected: list = field(default_factory=list)
    markers_h: list = field(default_factory=list)
    markers_v: list = field(default_factory=list)

    @property
    def blocks(self):
        return max(self.labels) if self.labels else 0

    def block_ranges(self):
        """{j: (first, last)} construction indices of points labelled j."""
        out = {}
        for k, j in enumerate(self.labels):
            lo, hi = out.get(j, (k, k))
            out[j] = (min(lo, k), max(hi, k))
        return out


class _Builder:
    def __init__(self, side, admissible):
        self.h = HalfSequence(side)
        self.label = 1
        self.sign = 1 if side == "plus" else -1
        self.admissible = admissible
        self.next_kind = "H"

    # ---- low level
    @property
    def pts(self):
        return self.h.points

    def bound(self):
        return 1.0 / self.label

    def _append(self, z, protected=False):
        self.h.points.append(z)
        self.h.labels.append(self.label)
        self.h.protected.append(protected)

    def push(self, z, label=None):
        """Append a generic (displaceable) point, nudging it off a collinear line."""
        pts = self.pts
        if pts and z == pts[-1]:
            if label is not None:
                self.label = label
            return
        if len(pts) >= 2 and collinearity_residual(pts[-2], pts[-1], z) <= _BUILD_COLLINEAR_TOL:
            x, y = pts[-2], pts[-1]
            nrm = 1j * (y - x) / abs(y - x)
            eta = min(1.0 / (8 * self.label), abs(z - y) / 8)
            for cand in (z + eta * nrm, z - eta * nrm):
                if self.admissible(cand, label if label is not None else self.label):
                    z = cand
                    break
            else:
                z = z + eta * nrm
        if pts and not safe_edge(pts[-1], z, self.bound()):
            raise SequenceError(f"step {pts[-1]!r} -> {z!r} violates the bound {self.bound():g}")
        if label is not None:
            self.label = label
        self._append(z)

    def move_to(self, z, path=None, label=None):
        """Reach z from the last point, subdividing if a single step is not safe."""
        pts = self.pts
        if not pts:
            if label is not None:
                self.label = label
            self._append(z)
            return
        y = pts[-1]
        if safe_edge(y, z, self.bound()):
            self.push(z, label=label)
            return
        path = path or (lambda s: y + s * (z - y))
        k = 2
        while k <= _MAX_SUBDIVISION:
            nodes = [path(s) for s in np.linspace(0.0, 1.0, k + 1)]
            nodes[0], nodes[-1] = y, z
            half = 0.5 * self.bound()
            if all(safe_edge(a, b, half) for a, b in zip(nodes, nodes[1:])):
                for w in nodes[1:-1]:
                    self.push(w)
                self.push(z, label=label)
                return
            k *= 2
        raise SequenceError(f"cannot connect {y!r} to {z!r} within step bound {self.bound():g}")

    # ---- markers
    def marker(self, scale, base_offset=None):
        """Insert a horizontal or vertical marker pair next to the last point.

        ``scale`` is the marker length; the pair is centred at last point + w
        with |w| = scale/2 unless ``base_offset`` overrides w.
        """
        kind = self.next_kind
        unit = 1.0 if kind == "H" else 1j
        v = self.sign * unit
        t = self.pts[-1]
        prev = self.pts[-2] if len(self.pts) >= 2 else None
        L = scale
        w0 = base_offset if base_offset is not None else 0.5 * L * 1j * v
        bound = self.bound()
        for rot in _ROTATIONS:
            w = w0 * rot
            a = t + w - 0.5 * L * v
            b = a + (complex(self.sign * L, 0.0) if kind == "H" else complex(0.0, self.sign * L))
            if prev is not None and collinearity_residual(prev, t, a) <= _BUILD_COLLINEAR_TOL:
                continue
            if collinearity_residual(t, a, b) <= _BUILD_COLLINEAR_TOL:
                continue
            if not (self.admissible(a, self.label) and self.admissible(b, self.label)):
                continue
            if not (safe_edge(t, a, bound) and safe_edge(a, b, bound)):
                continue
            k = len(self.pts)
            self._append(a, protected=True)
            self._append(b, protected=True)
            (self.h.markers_h if kind == "H" else self.h.markers_v).append(k)
            self.next_kind = "V" if kind == "H" else "H"
            return
        raise SequenceError(f"no admissible marker placement near {t!r}")


# --------------------------------------------------------------------------- sweeps


def sweep_order(net, start, rng):
    """Depth-first preorder of the proximity graph from ``start``.

    Unvisited neighbours are taken nearest first; exact ties (to 1e-12) are
    broken by ``rng``.
    """
    adj = net.adjacency
    pts = net.points
    seen = {start}
    order = [start]
    stack = [(start, iter(_ordered_neighbours(pts, adj, start, rng)))]
    while stack:
        node, it = stack[-1]
        for v in it:
            if v not in seen:
                seen.add(v)
                order.append(v)
                stack.append((v, iter(_ordered_neighbours(pts, adj, v, rng))))
                break
        else:
            stack.pop()
    return order


def _ordered_neighbours(pts, adj, u, rng):
    nb = list(adj[u])
    keys = []
    for v in nb:
        d = chordal_distance(complex(pts[u]), complex(pts[v]))
        keys.append((round(d, 12), rng.random(), v))
    keys.sort()
    return [k[2] for k in keys]


def _local_scale(pts, t, nxt):
    cands = []
    if len(pts) >= 2:
        cands.append(abs(t - pts[-2]))
    if nxt is not None and nxt != t:
        cands.append(abs(nxt - t))
    cands = [c for c in cands if c > 0]
    return min(cands) if cands else 1.0


# --------------------------------------------------------------------------- halves


def _build_net_half(spec, side, N, rng):
    b = _Builder(side, lambda z, j: True)
    j = 1
    cur = 0
    while True:
        net = net_at(spec, j)
        if j > 1:
            cur = net.index_of(prev_net.points[cur])
        order = sweep_order(net, cur, rng)
        emitted_before = len(b.pts)
        first = True
        pos = 0
        while True:
            target = order[pos % len(order)]
            path = shortest_index_path(net, cur, target)
            for m in path[1:-1]:
                b.move_to(complex(net.points[m]))
            if first:
                b.move_to(complex(net.points[target]), label=j)
                first = False
            else:
                b.move_to(complex(net.points[target]))
            cur = target
            t = b.pts[-1]
            nxt_idx = order[(pos + 1) % len(order)]
            nxt = complex(net.points[shortest_index_path(net, cur, nxt_idx)[1]]) if nxt_idx != cur else None
            L = min(1.0 / (4 * j), 0.5 * _local_scale(b.pts, t, nxt))
            b.marker(L)
            pos += 1
            if pos >= len(order) and len(b.pts) - emitted_before >= 4 * j:
                break
        prev_net = net
        if len(b.pts) >= N:
            return b.h
        j += 1


def _degenerate_target(p, j):
    if p is INF:
        r = 4.0 * j
        return complex(r * math.cos(j), r * math.sin(j))
    return p + 2.0 ** (-j) * cmath.exp(1j * j)


def _build_point_half(spec, side, N):
    p = spec.p
    if p is INF:
        def admissible(z, j):
            return abs(z) >= 4.0 * j
    else:
        def admissible(z, j):
            return abs(z - p) <= 2.0 ** (-j)
    b = _Builder(side, admissible)
    j = 1
    while True:
        z = _degenerate_target(p, j)
        if p is INF and b.pts:
            y = b.pts[-1]
            ly, lz = math.log(abs(y)), math.log(abs(z))
            ay, dz = cmath.phase(y), (cmath.phase(z) - cmath.phase(y) + math.pi) % (2 * math.pi) - math.pi

            def spiral(s, ly=ly, lz=lz, ay=ay, dz=dz):
                return cmath.exp(complex(ly + s * (lz - ly), ay + s * dz))

            b.move_to(z, path=spiral, label=j)
        else:
            b.move_to(z, label=j)
        start = len(b.pts) - 1
        while True:
            t = b.pts[-1]
            if p is INF:
                L = min(1.0 / (4 * j), 0.5 * _local_scale(b.pts, t, None))
                b.marker(L, base_offset=L * t / abs(t))
            else:
                rho = 2.0 ** (-j)
                L = min(1.0 / (4 * j), rho / 4, 0.5 * _local_scale(b.pts, t, None))
                b.marker(L, base_offset=0.5 * (p - t))
            if len(b.pts) - start >= 4 * j:
                break
            b.move_to(z)
        if len(b.pts) >= N:
            return b.h
        j += 1


def build_half_sequence(spec, side, N, seed=0):
    """One side of the double sequence, in construction (outward) order."""
    if side not in ("plus", "minus"):
        raise ValueError(f"side must be 'plus' or 'minus', got {side!r}")
    if N < 8:
        raise SequenceError(f"N must be >= 8, got {N}")
    rng = random.Random(f"{seed}:{side}")
    if isinstance(spec, Singleton):
        half = _build_point_half(spec, side, N)
    else:
        half = _build_net_half(spec, side, N, rng)
    if not half.markers_h or not half.markers_v:
        raise SequenceError(f"N={N} is too small to place markers of both orientations on the {side} side")
    return half


# --------------------------------------------------------------------------- double


@dataclass(frozen=True)
class DoubleSequence:
    """Points p_n for n_min <= n <= n_max stored in an array with offset -n_min."""

    points: np.ndarray
    n_min: int
    labels: np.ndarray
    step_level: np.ndarray
    protected: np.ndarray
    markers_h_minus: tuple
    markers_v_minus: tuple
    markers_h_plus: tuple
    markers_v_plus: tuple
    schedule_minus: dict
    schedule_plus: dict

    @property
    def n_max(self):
        return self.n_min + len(self.points) - 1

    def __getitem__(self, n):
        if not self.n_min <= n <= self.n_max:
            raise IndexError(n)
        return complex(self.points[n - self.n_min])

    def indices(self):
        return range(self.n_min, self.n_max + 1)

    def block_points(self, side, j):
        lo, hi = (self.schedule_plus if side == "plus" else self.schedule_minus)[j]
        return self.points[lo - self.n_min:hi - self.n_min + 1]

    def last_block(self, side):
        return max(self.schedule_plus if side == "plus" else self.schedule_minus)

    def markers(self):
        """(n, kind, side) for every marker segment [p_n, p_{n+1}]."""
        out = []
        for side, h, v in (("minus", self.markers_h_minus, self.markers_v_minus),
                           ("plus", self.markers_h_plus, self.markers_v_plus)):
            out += [(n, "H", side) for n in h] + [(n, "V", side) for n in v]
        return sorted(out)

    def marker_tags(self):
        tags = {}
        for n, kind, _ in self.markers():
            tags[n] = kind
        return tags


def _fix_junctions(pts, protected, step_level):
    """Resolve remaining collinear triples, displacing an unprotected point."""
    for _ in range(10 * len(pts)):
        bad = None
        for i in range(len(pts) - 2):
            if collinearity_residual(pts[i], pts[i + 1], pts[i + 2]) <= _BUILD_COLLINEAR_TOL:
                bad = i
                break
        if bad is None:
            return
        i = bad
        for m in (i + 1, i, i + 2):
            if protected[m]:
                continue
            ref_a = pts[m - 1] if m > 0 else pts[m + 1]
            ref_b = pts[m + 1] if m + 1 < len(pts) else pts[m - 1]
            line = pts[i + 2] - pts[i]
            if line == 0:
                line = pts[i + 1] - pts[i]
            nrm = 1j * line / abs(line)
            gap = min(abs(pts[m] - ref_a) or math.inf, abs(pts[m] - ref_b) or math.inf)
            eta = min(1.0 / 8, gap / 8)
            for cand in (pts[m] + eta * nrm, pts[m] - eta * nrm):
                ok = True
                if m > 0 and not safe_edge(pts[m - 1], cand, 1.0 / step_level[m - 1]):
                    ok = False
                if m + 1 < len(pts) and not safe_edge(cand, pts[m + 1], 1.0 / step_level[m]):
                    ok = False
                if ok:
                    pts[m] = cand
                    break
            else:
                continue
            break
        else:
            raise SequenceError(f"cannot resolve collinear triple at offset {i}")
    raise SequenceError("collinearity repair did not converge")


def build_double_sequence(kminus, kplus, N, seed=0):
    """Glue the two halves (minus side reversed) through a bridging chain at block-1 step size."""
    if N < 8:
        raise SequenceError(f"N must be >= 8, got {N}")
    minus = build_half_sequence(kminus, "minus", N, seed)
    plus = build_half_sequence(kplus, "plus", N, seed)

    # bridge q_0 -> r_0 with step bound 1
    q0, r0 = minus.points[0], plus.points[0]
    bridge = []
    if not safe_edge(q0, r0, 1.0):
        k = 2
        while True:
            nodes = [q0 + s * (r0 - q0) for s in np.linspace(0.0, 1.0, k + 1)]
            nodes[0], nodes[-1] = q0, r0
            if all(safe_edge(a, b, 0.5) for a, b in zip(nodes, nodes[1:])):
                break
            k *= 2
            if k > _MAX_SUBDIVISION:
                raise SequenceError("cannot bridge the two half-sequences")
        bridge = nodes[1:-1]

    mq = len(minus.points)
    m = len(bridge)
    pts = list(reversed(minus.points)) + bridge + list(plus.points)
    labels = list(reversed(minus.labels)) + [1] * m + list(plus.labels)
    protected = list(reversed(minus.protected)) + [False] * m + list(plus.protected)
    n_min = -(mq + m)
    off = -n_min

    # step (n, n+1): plus side departs from p_n, minus side from p_{n+1}
    step_level = []
    for n in range(n_min, n_min + len(pts) - 1):
        step_level.append(labels[n + off] if n >= 0 else labels[n + 1 + off])

    _fix_junctions(pts, protected, step_level)

    def minus_index(k):
        return -m - 1 - k

    mh_minus = tuple(sorted(minus_index(k + 1) for k in minus.markers_h))
    mv_minus = tuple(sorted(minus_index(k + 1) for k in minus.markers_v))

    sched_minus = {}
    for j, (lo, hi) in minus.block_ranges().items():
        sched_minus[j] = (minus_index(hi), minus_index(lo))
    lo1, hi1 = sched_minus[1]
    sched_minus[1] = (lo1, -1) if m else (lo1, hi1)
    sched_plus = dict(plus.block_ranges())

    arr = np.array(pts, dtype=np.complex128)
    arr.setflags(write=False)
    seq = DoubleSequence(
        points=arr,
        n_min=n_min,
        labels=np.array(labels),
        step_level=np.array(step_level),
        protected=np.array(protected),
        markers_h_minus=mh_minus,
        markers_v_minus=mv_minus,
        markers_h_plus=tuple(plus.markers_h),
        markers_v_plus=tuple(plus.markers_v),
        schedule_minus=sched_minus,
        schedule_plus=sched_plus,
    )
    validate(seq)
    return seq


def validate(seq):
    """Check every DoubleSequence invariant; raises SequenceError with the first failure."""
    pts = seq.points
    off = -seq.n_min
    for n in range(seq.n_min, seq.n_max):
        a, b = complex(pts[n + off]), complex(pts[n + off + 1])
        bound = 1.0 / seq.step_level[n + off]
        if not chordal_distance(a, b) < bound:
            raise SequenceError(f"step {n} has chordal length {chordal_distance(a, b):g} >= {bound:g}")
        if not safe_edge(a, b, bound):
            raise SequenceError(f"step {n} is not a safe edge at {bound:g}")
    for n in range(seq.n_min, seq.n_max - 1):
        a, b, c = (complex(pts[n + off + i]) for i in range(3))
        if collinearity_residual(a, b, c) <= COLLINEAR_TOL:
            raise SequenceError(f"points {n}, {n + 1}, {n + 2} are collinear")
    for n in seq.markers_h_minus + seq.markers_h_plus:
        d = complex(pts[n + off + 1]) - complex(pts[n + off])
        if not (d.imag == 0.0 and d.real > 0.0):
            raise SequenceError(f"marker segment {n} is not horizontal left-to-right: {d!r}")
    for n in seq.markers_v_minus + seq.markers_v_plus:
        d = complex(pts[n + off + 1]) - complex(pts[n + off])
        if not (d.real == 0.0 and d.imag > 0.0):
            raise SequenceError(f"marker segment {n} is not vertical bottom-to-top: {d!r}")
    for name in ("minus", "plus"):
        blocks = len(seq.schedule_minus if name == "minus" else seq.schedule_plus)
        h = seq.markers_h_minus if name == "minus" else seq.markers_h_plus
        v = seq.markers_v_minus if name == "minus" else seq.markers_v_plus
        need = max(1, blocks // 2)
        if len(h) < need or len(v) < need:
            raise SequenceError(f"{name} side has too few markers ({len(h)} H, {len(v)} V; need {need})")
    return True
