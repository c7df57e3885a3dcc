"""Points of the extended plane and the chordal metric.

Finite points are plain Python ``complex`` values; the point at infinity
is the singleton :data:`INF`. Array routines use ``complex(inf, 0)`` for
infinity so that point clouds can live in one numpy array.
"""

import math

import numpy as np

from . import kernels

MAX_MODULUS = 1e150


class InvalidPointError(ValueError):
    pass


class VerificationError(ValueError):
    """Raised for ill-posed verification requests (e.g. empty sets)."""


class _Infinity:
    _instance = None

    def __new__(cls):
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __repr__(self):
        return "INF"

    def __reduce__(self):
        return (_Infinity, ())


INF = _Infinity()


def is_inf(p):
    return p is INF


def check_point(p):
    """Validate a SpherePoint and return its canonical form."""
    if p is INF:
        return INF
    if isinstance(p, (int, float, complex, np.number)):
        z = complex(p)
        if not (math.isfinite(z.real) and math.isfinite(z.imag)):
            raise InvalidPointError(f"non-finite coordinates in {p!r}; use INF for infinity")
        if abs(z) > MAX_MODULUS:
            raise InvalidPointError(f"modulus of {p!r} exceeds {MAX_MODULUS:g}")
        return z
    raise InvalidPointError(f"not a point: {p!r}")


_INF_WORDS = {"inf", "infinity", "∞", "+inf"}


def parse_point(obj):
    """Parse the JSON encoding of a point.

    Accepts numbers, ``[re, im]`` pairs, strings such as ``"2+3i"``, and
    ``"inf"`` for the point at infinity.
    """
    if isinstance(obj, str):
        s = obj.strip().lower().replace(" ", "")
        if s in _INF_WORDS:
            return INF
        if s.endswith("i"):
            s = s[:-1] + "j"
        if s in ("j", "+j", "-j"):
            s = s.replace("j", "1j")
        try:
            z = complex(s)
        except ValueError:
            raise InvalidPointError(f"cannot parse point {obj!r}") from None
        return check_point(z)
    if isinstance(obj, (list, tuple)):
        if len(obj) != 2:
            raise InvalidPointError(f"point pair must have two entries: {obj!r}")
        return check_point(complex(float(obj[0]), float(obj[1])))
    if isinstance(obj, bool) or obj is None:
        raise InvalidPointError(f"not a point: {obj!r}")
    return check_point(obj)


def format_point(p):
    if p is INF:
        return "inf"
    return [float(p.real), float(p.imag)]


def to_array(points):
    """Pack SpherePoints into a complex array (infinity -> inf)."""
    return np.array([complex(math.inf, 0.0) if p is INF else complex(p) for p in points],
                    dtype=np.complex128)


def from_array(arr):
    return [INF if (math.isinf(z.real) or math.isinf(z.imag)) else complex(z) for z in arr]


def chordal_distance(p, q):
    """d(z, w) = 2|z - w| / (sqrt(1+|z|^2) sqrt(1+|w|^2)), d(z, inf) = 2/sqrt(1+|z|^2)."""
    if p is INF and q is INF:
        return 0.0
    if p is INF or q is INF:
        z = q if p is INF else p
        return min(2.0, 2.0 / math.hypot(1.0, abs(z)))
    z, w = complex(p), complex(q)
    if z == w:
        return 0.0
    az, aw = abs(z), abs(w)
    if az <= MAX_MODULUS and aw <= MAX_MODULUS:
        d = 2.0 * abs(z - w) / (math.hypot(1.0, az) * math.hypot(1.0, aw))
    else:
        # beyond the parse cap (curve samples): fall back to the inverted representation
        e = kernels.chordal_embed([z, w])
        dx = e[0, 0] * e[1, 2] - e[1, 0] * e[0, 2]
        dy = e[0, 1] * e[1, 2] - e[1, 1] * e[0, 2]
        d = 2.0 * math.hypot(dx, dy) / (e[0, 3] * e[1, 3])
    return min(d, 2.0)


def chordal_to_array(p, arr):
    """Chordal distances from one point to every point of an array."""
    e = kernels.chordal_embed(arr)
    ep = kernels.chordal_embed(to_array([p]))[0]
    dx = ep[0] * e[:, 2] - e[:, 0] * ep[2]
    dy = ep[1] * e[:, 2] - e[:, 1] * ep[2]
    return np.minimum(2.0 * np.hypot(dx, dy) / (ep[3] * e[:, 3]), 2.0)


def _as_cloud(points):
    if isinstance(points, np.ndarray):
        return points.astype(np.complex128, copy=False).ravel()
    return to_array(list(points))


def hausdorff_chordal(A, B):
    """Chordal Hausdorff distance between two finite nonempty point sets."""
    a, b = _as_cloud(A), _as_cloud(B)
    if a.size == 0 or b.size == 0:
        raise VerificationError("Hausdorff distance of an empty point set is undefined")
    return min(kernels.hausdorff(a, b), 2.0)


def segment_points(a, b, samples):
    t = np.linspace(0.0, 1.0, samples)
    pts = a + t * (b - a)
    pts[-1] = b
    return pts


def _from_pole(z):
    """Image of z on the unit sphere minus the north pole, overflow-free."""
    r = abs(z)
    if r <= 1:
        q = 1.0 + r * r
        return np.array([2 * z.real / q, 2 * z.imag / q, -2.0 / q])
    u = z / r
    q = r + 1.0 / r
    return np.array([2 * u.real / q, 2 * u.imag / q, -2.0 / (r * q)])


def segment_chordal_diameter(a, b, samples=None):
    """Chordal diameter of the image of the Euclidean segment [a, b].

    A short chordal hop between two far-out points may still cross the
    origin along its Euclidean segment; this catches that.  The image of a
    line is a circle through infinity, so the diameter is exact: the chord
    |AB| when the arc is the short one, the circle's diameter otherwise.
    With ``samples`` given, the maximum over that many equally spaced
    points is returned instead.
    """
    if a is INF or b is INF:
        raise InvalidPointError("segment endpoints must be finite")
    if samples is not None and samples < 2:
        raise ValueError("samples must be >= 2")
    a, b = complex(a), complex(b)
    if a == b:
        return 0.0
    chord = chordal_distance(a, b)
    if samples is not None:
        d = kernels.diameter(segment_points(a, b, samples))
        return min(max(d, chord), 2.0)
    pa, pb = _from_pole(a), _from_pole(b)
    if float(pa @ pb) >= 0.0:
        return chord
    # the pole sees AB under an obtuse angle: the arc through a, b avoiding
    # the pole is the long one and contains a diametrical pair
    pa, pb = pa / np.linalg.norm(pa), pb / np.linalg.norm(pb)
    sin_angle = float(np.linalg.norm(np.cross(pa, pb)))
    return min(2.0, chord / sin_angle) if sin_angle > 0 else 2.0
