import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from clustercurve import continuum as cn
from clustercurve.sphere import INF, chordal_distance, chordal_to_array

BUILTINS = [
    cn.Segment(0j, 1 + 0j),
    cn.Segment(-3 + 2j, 4 - 1j),
    cn.Circle(0j, 1.0),
    cn.Circle(2 - 1j, 3.0),
    cn.Polyline((0j, 1 + 0j, 1 + 1j, -1 + 1j)),
]


def test_segment_level_one():
    net = cn.net_at(cn.Segment(0j, 1 + 0j), 1)
    pts = set(net.points.tolist())
    assert {0j, 1 + 0j} <= pts
    assert len(pts) >= 3
    assert net.mesh <= 0.5


def test_singleton_level_five():
    net = cn.net_at(cn.Singleton(2 + 3j), 5)
    assert net.points.tolist() == [2 + 3j]
    assert net.mesh == 0
    assert net.delta == pytest.approx(0.1)


def test_circle_level_two():
    net = cn.net_at(cn.Circle(0j, 1.0), 2)
    assert len(net) >= math.ceil(2 * math.pi / (2 * math.asin(1 / 8)))
    assert net.mesh <= 0.25
    rng = np.random.default_rng(0)
    samples = cn.Circle(0j, 1.0).sample(10_000, rng)
    worst = max(chordal_to_array(z, net.points).min() for z in samples)
    assert worst <= 0.25


def test_infinity_surrogate():
    for j in range(1, 9):
        net = cn.net_at(cn.Singleton(INF), j)
        z = complex(net.points[0])
        assert abs(z) == pytest.approx(4 * j)
        assert chordal_distance(z, INF) < 1 / (2 * j)


@pytest.mark.parametrize("spec", BUILTINS, ids=str)
def test_covering_and_nesting(spec):
    rng = np.random.default_rng(1)
    samples = spec.sample(10_000, rng)
    prev = None
    for j in range(1, 9):
        net = cn.net_at(spec, j)
        assert net.mesh <= 1 / (2 * j) and net.delta <= 1 / (2 * j)
        worst = max(chordal_to_array(z, net.points).min() for z in samples[:: 10])
        assert worst <= 1 / (2 * j)
        if prev is not None:
            assert set(prev.points.tolist()) <= set(net.points.tolist())
        prev = net


def test_safe_edge_examples():
    assert cn.safe_edge(0j, 0.1 + 0j, 0.5)
    assert not cn.safe_edge(10 + 0j, -10 + 0j, 0.5)
    assert cn.safe_edge(1 + 1j, 1 + 1j, 0.1)


def test_chain_examples():
    # gaps are chordal: d(0, 0.5) = 0.894, so the forced path needs a finer spacing
    net = cn.NetLevel(1, [0j, 0.25 + 0j, 0.5 + 0j], 0.25, 0.6)
    assert cn.epsilon_chain(net, 0j, 0.5 + 0j).points == (0j, 0.25 + 0j, 0.5 + 0j)
    assert cn.epsilon_chain(net, 0.25, 0.25).points == (0.25 + 0j,)
    wide = cn.NetLevel(1, [0j, 0.5 + 0j, 1 + 0j], 0.25, 0.6)
    with pytest.raises(cn.DisconnectedNetError):
        cn.epsilon_chain(wide, 0j, 1 + 0j)
    roots = [complex(math.cos(k * math.pi / 4), math.sin(k * math.pi / 4)) for k in range(8)]
    net = cn.NetLevel(1, roots, 0.4, 0.8)
    chain = cn.epsilon_chain(net, roots[0], roots[4])
    assert len(chain.points) == 5
    ims = [z.imag for z in chain.points[1:-1]]
    assert all(y > 0 for y in ims) or all(y < 0 for y in ims)
    assert chain.validate(roots[0], roots[4])


def test_chain_ties_are_lexicographic():
    # a square: two shortest routes from 0 to 2, the lower index wins
    pts = [0j, 0.1 + 0j, 0.1 + 0.1j, 0.1j]
    net = cn.NetLevel(1, pts, 0.1, 0.25)
    assert cn.epsilon_chain(net, pts[0], pts[2]).points == (pts[0], pts[1], pts[2])


@settings(max_examples=30, deadline=None)
@given(st.integers(1, 6), st.integers(0, 10_000), st.integers(0, 10_000), st.integers(0, 10_000))
def test_chain_composition(j, a, b, c):
    net = cn.net_at(cn.Circle(0j, 1.0), j)
    p, q, s = (net.points[x % len(net)] for x in (a, b, c))
    first = cn.epsilon_chain(net, p, q).points
    second = cn.epsilon_chain(net, q, s).points
    joined = cn.Chain(first + second[1:], net.delta)
    assert joined.validate(p, s)


def test_disconnected_custom_net():
    spec = cn.spec_from_json({"kind": "custom", "levels": [{"points": [0, 5], "mesh": 0.1, "delta": 0.5}]})
    with pytest.raises(cn.DisconnectedNetError, match="disconnected"):
        cn.net_at(spec, 1)


def test_custom_levels_validation():
    lev = cn.NetLevel(1, [0j, 0.1 + 0j], 0.1, 0.5)
    with pytest.raises(cn.ContinuumError):
        cn.Custom((lev, cn.NetLevel(2, [0j], 0.2, 0.25)))
    spec = cn.Custom((lev,))
    with pytest.raises(cn.ContinuumError):
        cn.net_at(spec, 2)


@pytest.mark.parametrize("obj,field", [
    ({"kind": "blob"}, "kind"),
    ({"kind": "segment", "a": 0}, "b"),
    ({"kind": "segment", "a": 0, "b": 0}, "b"),
    ({"kind": "circle", "center": 0, "radius": "x"}, "radius"),
    ({"kind": "singleton", "p": "zz"}, "p"),
])
def test_spec_errors_name_field(obj, field):
    with pytest.raises(cn.ContinuumError) as exc:
        cn.spec_from_json(obj)
    assert exc.value.field == field


@pytest.mark.parametrize("spec", BUILTINS + [cn.Singleton(INF), cn.Singleton(1 - 1j)], ids=str)
def test_json_round_trip(spec):
    assert cn.spec_from_json(cn.spec_to_json(spec)) == spec
