"""Machine descriptions of continua, their nested nets, and epsilon-chains.

A continuum is handed to the construction as a family of finite nets,
one per level ``j``.  Level ``j`` covers the continuum to chordal mesh
``r_j <= 1/(2j)`` and its proximity graph at radius ``delta_j <= 1/(2j)``
is connected, where an edge ``(a, b)`` is kept only when the whole
Euclidean segment ``[a, b]`` is chordally short (see :func:`safe_edge`).
"""

from __future__ import annotations

import math
from collections import deque
from dataclasses import dataclass, field
from functools import cached_property, lru_cache

import numpy as np

from . import kernels
from .sphere import (
    INF,
    InvalidPointError,
    chordal_distance,
    check_point,
    parse_point,
    segment_chordal_diameter,
)

MAX_REFINEMENT = 22


class ContinuumError(ValueError):
    """Invalid continuum description or a net that fails its certificates."""

    def __init__(self, message, field=None):
        super().__init__(message)
        self.field = field


class DisconnectedNetError(ContinuumError):
    def __init__(self, level, components):
        a, b = components[0], components[1]
        super().__init__(
            f"net at level {level} is disconnected: component {_brief(a)} "
            f"cannot reach component {_brief(b)} ({len(components)} components)"
        )
        self.level = level
        self.components = components


def _brief(comp, limit=6):
    idx = sorted(comp)
    s = ", ".join(str(i) for i in idx[:limit])
    return "{" + s + (", ..." if len(idx) > limit else "") + "}"


def safe_edge(a, b, delta):
    """Both the chordal gap and the chordal diameter of the segment [a, b] are below delta."""
    a, b = complex(a), complex(b)
    if a == b:
        return delta > 0
    if chordal_distance(a, b) >= delta:
        return False
    return segment_chordal_diameter(a, b) < delta


@dataclass(frozen=True, eq=False)
class NetLevel:
    j: int
    points: np.ndarray
    mesh: float
    delta: float

    def __post_init__(self):
        pts = np.array(self.points, dtype=np.complex128).ravel()
        pts.setflags(write=False)
        object.__setattr__(self, "points", pts)

    def __len__(self):
        return len(self.points)

    def index_of(self, p):
        hits = np.flatnonzero(self.points == complex(p))
        if hits.size == 0:
            raise ContinuumError(f"point {p!r} is not in the level-{self.j} net")
        return int(hits[0])

    @cached_property
    def adjacency(self):
        """Sorted neighbour lists of the safe-edge proximity graph at radius delta."""
        pts = self.points
        n = len(pts)
        e = kernels.chordal_embed(pts)
        dx = e[:, None, 0] * e[None, :, 2] - e[None, :, 0] * e[:, None, 2]
        dy = e[:, None, 1] * e[None, :, 2] - e[None, :, 1] * e[:, None, 2]
        d = 2.0 * np.hypot(dx, dy) / (e[:, None, 3] * e[None, :, 3])
        adj = [[] for _ in range(n)]
        ii, kk = np.nonzero(np.triu(d < self.delta, k=1))
        for i, k in zip(ii.tolist(), kk.tolist()):
            if segment_chordal_diameter(pts[i], pts[k]) < self.delta:
                adj[i].append(k)
                adj[k].append(i)
        return tuple(tuple(sorted(a)) for a in adj)

    def components(self):
        adj = self.adjacency
        seen = [False] * len(adj)
        comps = []
        for s in range(len(adj)):
            if seen[s]:
                continue
            comp, queue = [], deque([s])
            seen[s] = True
            while queue:
                u = queue.popleft()
                comp.append(u)
                for v in adj[u]:
                    if not seen[v]:
                        seen[v] = True
                        queue.append(v)
            comps.append(comp)
        return comps

    def check(self):
        """Verify the level invariants; raises on violation."""
        bound = 1.0 / (2 * self.j)
        if len(self.points) == 0:
            raise ContinuumError(f"net at level {self.j} is empty")
        if self.mesh > bound or self.delta > bound:
            raise ContinuumError(
                f"level {self.j}: mesh {self.mesh:g} / delta {self.delta:g} exceed 1/(2j) = {bound:g}"
            )
        if len(set(self.points.tolist())) != len(self.points):
            raise ContinuumError(f"level {self.j}: duplicate net points")
        comps = self.components()
        if len(comps) > 1:
            raise DisconnectedNetError(self.j, comps)
        return self


@dataclass(frozen=True)
class Chain:
    points: tuple
    delta: float

    def validate(self, start=None, end=None):
        pts = self.points
        if not pts:
            raise ContinuumError("empty chain")
        if start is not None and pts[0] != complex(start):
            raise ContinuumError("chain does not start at the requested point")
        if end is not None and pts[-1] != complex(end):
            raise ContinuumError("chain does not end at the requested point")
        for a, b in zip(pts, pts[1:]):
            if not safe_edge(a, b, self.delta):
                raise ContinuumError(f"chain step {a!r} -> {b!r} is not a safe edge at {self.delta:g}")
        return True


def bfs_levels(adj, target):
    dist = [-1] * len(adj)
    dist[target] = 0
    queue = deque([target])
    while queue:
        u = queue.popleft()
        for v in adj[u]:
            if dist[v] < 0:
                dist[v] = dist[u] + 1
                queue.append(v)
    return dist


def shortest_index_path(net, i, k):
    """Fewest-edge path from i to k, lexicographically smallest among ties."""
    adj = net.adjacency
    dist = bfs_levels(adj, k)
    if dist[i] < 0:
        comps = net.components()
        ci = next(c for c in comps if i in c)
        ck = next(c for c in comps if k in c)
        raise DisconnectedNetError(net.j, [ci, ck])
    path = [i]
    u = i
    while u != k:
        u = next(v for v in adj[u] if dist[v] == dist[u] - 1)
        path.append(u)
    return path


def epsilon_chain(net, p, q):
    """Chain of net points from p to q whose consecutive steps are safe edges at net.delta."""
    i, k = net.index_of(p), net.index_of(q)
    path = shortest_index_path(net, i, k)
    return Chain(tuple(complex(net.points[m]) for m in path), net.delta)


# --------------------------------------------------------------------------- specs


def _level_bound(j):
    if j < 1:
        raise ContinuumError(f"net level must be >= 1, got {j}")
    return 1.0 / (2 * j)


def _chordal_gaps(pts):
    e = kernels.chordal_embed(pts)
    a, b = e[:-1], e[1:]
    dx = a[:, 0] * b[:, 2] - b[:, 0] * a[:, 2]
    dy = a[:, 1] * b[:, 2] - b[:, 1] * a[:, 2]
    return 2.0 * np.hypot(dx, dy) / (a[:, 3] * b[:, 3])


def _dyadic_segment(a, b, j, m0=1):
    """Smallest dyadic subdivision of [a, b] whose pieces have chordal gap < 1/(2j)."""
    bound = _level_bound(j)
    for m in range(m0, MAX_REFINEMENT + 1):
        n = 2 ** m
        pts = a + (b - a) * (np.arange(n + 1) / n)
        pts[-1] = b
        gaps = _chordal_gaps(pts)
        if gaps.max() < bound:
            return pts, float(gaps.max())
    raise ContinuumError(f"segment [{a}, {b}] needs more than 2^{MAX_REFINEMENT} pieces at level {j}")


@dataclass(frozen=True)
class Singleton:
    p: object

    kind = "singleton"

    def __post_init__(self):
        object.__setattr__(self, "p", check_point(self.p))

    @property
    def degenerate(self):
        return True

    def net(self, j):
        bound = _level_bound(j)
        if self.p is INF:
            z = infinity_surrogate(j)
            return NetLevel(j, [z], chordal_distance(z, INF), bound)
        return NetLevel(j, [self.p], 0.0, bound)

    def sample(self, count, rng):
        if self.p is INF:
            return np.full(count, complex(math.inf, 0.0))
        return np.full(count, self.p, dtype=np.complex128)


def infinity_surrogate(j):
    """Finite stand-in for infinity at level j: modulus 2/r_j with r_j = 1/(2j)."""
    radius = 2.0 / _level_bound(j)
    return complex(radius * math.cos(j), radius * math.sin(j))


@dataclass(frozen=True)
class Segment:
    a: complex
    b: complex

    kind = "segment"

    def __post_init__(self):
        for name in ("a", "b"):
            v = getattr(self, name)
            if v is INF:
                raise ContinuumError("segment endpoints must be finite", field=name)
            object.__setattr__(self, name, check_point(v))
        if self.a == self.b:
            raise ContinuumError("segment endpoints must differ (use a singleton)", field="b")

    degenerate = False

    def net(self, j):
        pts, gap = _dyadic_segment(self.a, self.b, j)
        return NetLevel(j, pts, gap, _level_bound(j))

    def sample(self, count, rng):
        t = rng.random(count)
        return self.a + t * (self.b - self.a)


@dataclass(frozen=True)
class Circle:
    center: complex
    radius: float

    kind = "circle"
    degenerate = False

    def __post_init__(self):
        if self.center is INF:
            raise ContinuumError("circle center must be finite", field="center")
        object.__setattr__(self, "center", check_point(self.center))
        r = float(self.radius)
        if not (r > 0 and math.isfinite(r)):
            raise ContinuumError("circle radius must be a positive real", field="radius")
        object.__setattr__(self, "radius", r)

    def net(self, j):
        bound = _level_bound(j)
        for m in range(3, MAX_REFINEMENT + 1):
            n = 2 ** m
            pts = self.center + self.radius * np.exp(2j * np.pi * np.arange(n) / n)
            gaps = _chordal_gaps(np.append(pts, pts[0]))
            if gaps.max() < bound:
                return NetLevel(j, pts, float(gaps.max()), bound)
        raise ContinuumError(f"circle needs more than 2^{MAX_REFINEMENT} points at level {j}")

    def sample(self, count, rng):
        return self.center + self.radius * np.exp(2j * np.pi * rng.random(count))


@dataclass(frozen=True)
class Polyline:
    nodes: tuple

    kind = "polyline"
    degenerate = False

    def __post_init__(self):
        nodes = tuple(self.nodes)
        if len(nodes) < 2:
            raise ContinuumError("polyline needs at least two nodes", field="nodes")
        checked = []
        for v in nodes:
            if v is INF:
                raise ContinuumError("polyline nodes must be finite", field="nodes")
            checked.append(check_point(v))
        if len(set(checked)) != len(checked):
            raise ContinuumError("polyline nodes must be pairwise distinct", field="nodes")
        object.__setattr__(self, "nodes", tuple(checked))

    def net(self, j):
        out, seen, mesh = [], set(), 0.0
        for a, b in zip(self.nodes, self.nodes[1:]):
            pts, gap = _dyadic_segment(a, b, j)
            mesh = max(mesh, gap)
            for z in pts.tolist():
                if z not in seen:
                    seen.add(z)
                    out.append(z)
        return NetLevel(j, out, mesh, _level_bound(j))

    def sample(self, count, rng):
        nodes = np.array(self.nodes)
        lengths = np.abs(np.diff(nodes))
        edge = rng.choice(len(lengths), size=count, p=lengths / lengths.sum())
        t = rng.random(count)
        return nodes[edge] + t * (nodes[edge + 1] - nodes[edge])


@dataclass(frozen=True)
class Custom:
    levels: tuple = field(default=())

    kind = "custom"

    def __post_init__(self):
        levels = tuple(self.levels)
        if not levels:
            raise ContinuumError("custom continuum needs at least one level", field="levels")
        for idx, lev in enumerate(levels, start=1):
            if lev.j != idx:
                raise ContinuumError(f"custom level {idx} is labelled j={lev.j}", field="levels")
        for a, b in zip(levels, levels[1:]):
            if not b.mesh < a.mesh:
                raise ContinuumError("custom levels must have strictly decreasing mesh", field="levels")
        object.__setattr__(self, "levels", levels)

    @property
    def degenerate(self):
        return False

    def net(self, j):
        if j > len(self.levels):
            raise ContinuumError(f"custom continuum provides only {len(self.levels)} levels, level {j} requested")
        return self.levels[j - 1]

    def sample(self, count, rng):
        pts = self.levels[-1].points
        return pts[rng.integers(len(pts), size=count)]


@lru_cache(maxsize=512)
def _net_cached(spec, j):
    return spec.net(j).check()


def net_at(spec, j):
    """Level-j net of a continuum, with its mesh and connectivity certified."""
    _level_bound(j)
    if isinstance(spec, Custom):
        return spec.net(j).check()
    return _net_cached(spec, j)


# --------------------------------------------------------------------------- JSON


def _field(obj, name):
    if name not in obj:
        raise ContinuumError(f"continuum spec is missing field '{name}'", field=name)
    return obj[name]


def _point_field(obj, name):
    try:
        return parse_point(_field(obj, name))
    except InvalidPointError as exc:
        raise ContinuumError(f"field '{name}': {exc}", field=name) from None


def spec_from_json(obj):
    """Build a ContinuumSpec from its JSON object form."""
    if not isinstance(obj, dict):
        raise ContinuumError("continuum spec must be a JSON object", field="kind")
    kind = _field(obj, "kind")
    if kind == "singleton":
        return Singleton(_point_field(obj, "p"))
    if kind == "segment":
        return Segment(_point_field(obj, "a"), _point_field(obj, "b"))
    if kind == "circle":
        try:
            radius = float(_field(obj, "radius"))
        except (TypeError, ValueError):
            raise ContinuumError("field 'radius' must be a number", field="radius") from None
        return Circle(_point_field(obj, "center"), radius)
    if kind == "polyline":
        raw = _field(obj, "nodes")
        try:
            nodes = tuple(parse_point(v) for v in raw)
        except (InvalidPointError, TypeError) as exc:
            raise ContinuumError(f"field 'nodes': {exc}", field="nodes") from None
        return Polyline(nodes)
    if kind == "custom":
        levels = []
        for idx, lev in enumerate(_field(obj, "levels"), start=1):
            try:
                pts = [parse_point(v) for v in lev["points"]]
                if any(p is INF for p in pts):
                    raise InvalidPointError("net points must be finite")
                levels.append(NetLevel(idx, pts, float(lev["mesh"]), float(lev["delta"])))
            except (KeyError, TypeError, ValueError) as exc:
                raise ContinuumError(f"field 'levels[{idx - 1}]': {exc}", field="levels") from None
        return Custom(tuple(levels))
    raise ContinuumError(f"unknown continuum kind {kind!r}", field="kind")


def spec_to_json(spec):
    from .sphere import format_point

    if isinstance(spec, Singleton):
        return {"kind": "singleton", "p": format_point(spec.p)}
    if isinstance(spec, Segment):
        return {"kind": "segment", "a": format_point(spec.a), "b": format_point(spec.b)}
    if isinstance(spec, Circle):
        return {"kind": "circle", "center": format_point(spec.center), "radius": spec.radius}
    if isinstance(spec, Polyline):
        return {"kind": "polyline", "nodes": [format_point(p) for p in spec.nodes]}
    return {
        "kind": "custom",
        "levels": [
            {"points": [format_point(complex(p)) for p in lev.points], "mesh": lev.mesh, "delta": lev.delta}
            for lev in spec.levels
        ],
    }
