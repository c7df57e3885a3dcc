import math

import mpmath
import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from clustercurve.sphere import (
    INF,
    InvalidPointError,
    VerificationError,
    chordal_distance,
    format_point,
    hausdorff_chordal,
    parse_point,
    segment_chordal_diameter,
)

coord = st.floats(min_value=-1e6, max_value=1e6, allow_nan=False)
finite = st.builds(complex, coord, coord)
points = st.one_of(finite, st.just(INF))


def _oracle(z, w):
    mpmath.mp.dps = 40
    if z is INF and w is INF:
        return 0.0
    if z is INF or w is INF:
        u = w if z is INF else z
        return float(2 / mpmath.sqrt(1 + abs(mpmath.mpc(u)) ** 2))
    z, w = mpmath.mpc(z), mpmath.mpc(w)
    return float(2 * abs(z - w) / (mpmath.sqrt(1 + abs(z) ** 2) * mpmath.sqrt(1 + abs(w) ** 2)))


def test_chordal_examples():
    assert chordal_distance(0j, 0j) == 0
    assert chordal_distance(0j, INF) == 2
    assert chordal_distance(1 + 0j, INF) == pytest.approx(1.414214, abs=1e-6)
    assert chordal_distance(INF, INF) == 0


@given(points, points)
def test_chordal_matches_high_precision(p, q):
    assert chordal_distance(p, q) == pytest.approx(_oracle(p, q), abs=1e-14)


@given(points, points, points)
def test_triangle_inequality(p, q, r):
    assert chordal_distance(p, r) <= chordal_distance(p, q) + chordal_distance(q, r) + 1e-12


@given(points)
def test_identity_and_bound(p):
    assert chordal_distance(p, p) == 0
    assert chordal_distance(p, INF) <= 2


def test_near_modulus_cap_is_finite():
    big = complex(9e149, 0)
    assert chordal_distance(big, -big) == pytest.approx(_oracle(big, -big), abs=1e-14)
    assert chordal_distance(big, INF) > 0


def test_hausdorff_examples():
    A = [0j, 1 + 0j]
    assert hausdorff_chordal(A, A) == 0
    assert hausdorff_chordal([0j], [INF]) == 2
    assert hausdorff_chordal(A, [0j]) == pytest.approx(1.414214, abs=1e-6)
    with pytest.raises(VerificationError):
        hausdorff_chordal([], [0j])


@given(st.lists(points, min_size=1, max_size=6), st.lists(points, min_size=1, max_size=6))
def test_hausdorff_symmetric_and_zero_iff_equal(A, B):
    h = hausdorff_chordal(A, B)
    assert h == hausdorff_chordal(B, A)
    same = set(map(format_point_key, A)) == set(map(format_point_key, B))
    assert (h == 0) == same


def format_point_key(p):
    return "inf" if p is INF else complex(p)


def test_segment_diameter_examples():
    assert segment_chordal_diameter(0j, 1 + 0j, 33) == pytest.approx(math.sqrt(2), abs=1e-3)
    assert segment_chordal_diameter(2 + 1j, 2 + 1j, 2) == 0
    # the segment passes through -0.1, antipodal to 10, so the exact diameter is 2
    d = segment_chordal_diameter(10 + 0j, -10 + 0j, 201)
    assert d == pytest.approx(2.0, abs=1e-12)
    assert chordal_distance(10 + 0j, -0.1 + 0j) == pytest.approx(2.0, abs=1e-15)
    with pytest.raises(ValueError):
        segment_chordal_diameter(0j, 1j, 1)
    with pytest.raises(InvalidPointError):
        segment_chordal_diameter(0j, INF)


def _refined_diameter(a, b):
    """Sampled diameter with extra samples clustered where the segment passes the origin."""
    if a == b:
        return 0.0
    e = b - a
    # project with the unit direction: |e|^2 underflows for tiny segments
    t0 = min(1.0, max(0.0, -((a * (e / abs(e)).conjugate()).real) / abs(e)))
    off = np.geomspace(1e-9, 1.0, 1500)
    t = np.concatenate([np.linspace(0, 1, 2001), t0 + off, t0 - off, [t0]])
    z = a + np.clip(t, 0, 1) * e
    return float(max(
        np.max(2 * np.abs(z[:, None] - z[None, :]) / np.sqrt((1 + np.abs(z[:, None]) ** 2) * (1 + np.abs(z[None, :]) ** 2))),
        0.0))


@settings(max_examples=25, deadline=None)
@given(finite, finite)
def test_exact_segment_diameter_bounds_dense_sampling(a, b):
    exact = segment_chordal_diameter(a, b)
    dense = _refined_diameter(a, b)
    assert exact >= chordal_distance(a, b)
    assert exact >= dense - 1e-12
    assert exact <= dense + 1e-6


def test_default_sampling_misses_antipodes():
    # 129 uniform samples step over -1/142, the antipode of 142
    assert segment_chordal_diameter(142 + 0j, -1 + 0j, 129) < 1.995
    assert segment_chordal_diameter(142 + 0j, -1 + 0j) == pytest.approx(2.0, abs=1e-12)


def test_exact_diameter_near_cap():
    # the line Im z = 1/2 maps to a circle of diameter d(inf, i/2)
    d = segment_chordal_diameter(1e140 + 0.5j, -1e140 + 0.5j)
    assert d == pytest.approx(chordal_distance(INF, 0.5j), abs=1e-12)


def test_parse_and_format():
    assert parse_point("inf") is INF
    assert parse_point("∞") is INF
    assert parse_point("2+3i") == 2 + 3j
    assert parse_point("-i") == -1j
    assert parse_point([1, -2]) == 1 - 2j
    assert parse_point(-1) == -1
    assert format_point(INF) == "inf"
    assert format_point(2 + 3j) == [2.0, 3.0]
    for bad in ("nan", "x", [1, 2, 3], True, None, 1e151, float("inf")):
        with pytest.raises(InvalidPointError):
            parse_point(bad)
