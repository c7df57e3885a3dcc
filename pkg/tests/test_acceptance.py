"""One test per acceptance criterion; each records a PASS/FAIL line (see conftest)."""

import filecmp
import math
import os
import time

import networkx as nx
import numpy as np
import pytest

from clustercurve import analysis, approx, cli, gallery
from clustercurve import continuum as cn
from clustercurve.sequence import build_double_sequence, validate
from clustercurve.sphere import INF, chordal_distance

from conftest import record


def _chordal(z, w):
    """Independent chordal formula for finite points of moderate size."""
    return 2 * np.abs(z - w) / (np.sqrt(1 + np.abs(z) ** 2) * np.sqrt(1 + np.abs(w) ** 2))


# 1 ---------------------------------------------------------------------------

def _random_point(rng):
    r = rng.random()
    if r < 0.05:
        return INF
    scale = 10.0 ** rng.uniform(-6, 8)
    return complex(rng.standard_normal() * scale, rng.standard_normal() * scale)


def test_01_metric_axioms():
    rng = np.random.default_rng(20261016)
    worst_sym = worst_tri = 0.0
    identity_ok = True
    for _ in range(10_000):
        p, q, r = (_random_point(rng) for _ in range(3))
        dpq, dqp = chordal_distance(p, q), chordal_distance(q, p)
        worst_sym = max(worst_sym, abs(dpq - dqp))
        worst_tri = max(worst_tri, chordal_distance(p, r) - dpq - chordal_distance(q, r))
        identity_ok &= chordal_distance(p, p) == 0.0
        if p != q:
            identity_ok &= dpq > 0
    ok = worst_sym <= 1e-12 and worst_tri <= 1e-12 and identity_ok
    record(1, ok, f"10000 triples: symmetry err {worst_sym:.1e}, triangle excess {max(worst_tri, 0):.1e}, identity {identity_ok}")
    assert ok


# 2 ---------------------------------------------------------------------------

def _oracle_graph(net):
    """Safe-edge graph built independently: pairwise chordal test plus a 129-sample diameter."""
    pts = net.points
    g = nx.Graph()
    g.add_nodes_from(range(len(pts)))
    d = _chordal(pts[:, None], pts[None, :])
    s = np.linspace(0, 1, 129)
    for i, k in zip(*np.nonzero(np.triu(d < net.delta, 1))):
        seg = pts[i] + s * (pts[k] - pts[i])
        diam = max(_chordal(seg[:, None], seg[None, :]).max(), d[i, k])
        if diam < net.delta:
            g.add_edge(int(i), int(k))
    return g


BUILTIN_SPECS = [
    cn.Singleton(2 + 3j),
    cn.Singleton(INF),
    cn.Segment(0j, 1 + 0j),
    cn.Segment(-2 + 1j, 3 - 2j),
    cn.Circle(0j, 1.0),
    cn.Polyline((0j, 1 + 0j, 1 + 1j)),
]


def test_02_epsilon_chains():
    rng = np.random.default_rng(2)
    chains = 0
    failures = []
    for spec in BUILTIN_SPECS:
        for j in range(1, 9):
            net = cn.net_at(spec, j)
            g = _oracle_graph(net)
            if g.number_of_edges() != sum(len(a) for a in net.adjacency) // 2:
                failures.append(f"{spec} j={j}: edge sets differ")
            n = len(net)
            pairs = [(0, n - 1)] + [tuple(rng.integers(0, n, 2)) for _ in range(5)]
            for i, k in pairs:
                p, q = net.points[i], net.points[k]
                chain = cn.epsilon_chain(net, p, q)
                steps = list(zip(chain.points, chain.points[1:]))
                if not all(chordal_distance(a, b) < net.delta and cn.safe_edge(a, b, net.delta) for a, b in steps):
                    failures.append(f"{spec} j={j}: bad step")
                if len(steps) != nx.shortest_path_length(g, int(i), int(k)):
                    failures.append(f"{spec} j={j}: chain has {len(steps)} edges, oracle disagrees")
                chains += 1
    ok = not failures
    record(2, ok, f"{chains} chains over {len(BUILTIN_SPECS)} specs, j<=8; failures: {failures[:3]}")
    assert ok


# 3 ---------------------------------------------------------------------------

COMBOS = [
    (cn.Segment(0j, 1 + 0j), cn.Circle(0j, 1.0), 128, 1),
    (cn.Circle(0j, 1.0), cn.Circle(0j, 1.0), 64, 7),
    (cn.Singleton(-1 + 0j), cn.Singleton(1 + 0j), 32, 7),
    (cn.Segment(0j, 1 + 0j), cn.Singleton(INF), 32, 7),
    (cn.Singleton(0j), cn.Singleton(INF), 8, 42),
    (cn.Polyline((0j, 1 + 0j, 1 + 1j)), cn.Segment(-1j, 2 - 1j), 32, 42),
    (cn.Singleton(INF), cn.Circle(1 + 1j, 2.0), 128, 1),
    (cn.Circle(0j, 0.5), cn.Polyline((0j, 2 + 0j, 2 + 2j)), 8, 1),
    (cn.Singleton(2 + 3j), cn.Segment(0j, 1j), 128, 42),
]


def test_03_double_sequence_invariants():
    t0 = time.perf_counter()
    problems = []
    for km, kp, N, seed in COMBOS:
        seq = build_double_sequence(km, kp, N, seed)
        try:
            validate(seq)
        except Exception as exc:  # noqa: BLE001
            problems.append(f"{km}/{kp}: {exc}")
    elapsed = time.perf_counter() - t0
    ok = not problems and elapsed < 10
    record(3, ok, f"{len(COMBOS)} combos validated in {elapsed:.2f}s; problems: {problems[:2]}")
    assert ok


# 4 ---------------------------------------------------------------------------

def test_04_polygonal_nodes_and_marker_angles(seg_circle_128):
    _, _, seq, eta, markers, _ = seg_circle_128
    ns = np.arange(seq.n_min, seq.n_max + 1, dtype=np.float64)
    v, _ = eta.evaluate(ns)
    exact_nodes = bool(np.all(v == seq.points))
    _, d = eta.evaluate(np.array([m.s for m in markers]))
    angles = np.angle(d)
    exact_angles = all(a == m.expected_angle for a, m in zip(angles, markers))
    ok = exact_nodes and exact_angles
    record(4, ok, f"{len(ns)} nodes exact: {exact_nodes}; {len(markers)} marker angles exactly 0 or pi/2: {exact_angles}")
    assert ok


# 5 ---------------------------------------------------------------------------

def _off_segment(z, a, b):
    """Relative distance of z from the segment [a, b] (0 on it)."""
    e = b - a
    u = ((z - a) * np.conj(e)).real / abs(e) ** 2
    perp = np.abs(((z - a) * np.conj(e)).imag) / abs(e)
    outside = np.maximum(0, np.maximum(-u, u - 1)) * abs(e)
    return (perp + outside) / max(abs(a), abs(b))


def test_05_smoothing(seg_circle_128):
    _, _, seq, eta, markers, sigma = seg_circle_128
    worst_v = worst_d = worst_res = 0.0
    for b in sigma.blends:
        for edge, base_t in ((b.n - b.delta, b.n - 0.5), (b.n + b.delta, b.n + 0.5)):
            vs, ds = sigma(edge)
            # the linear piece continued from a point away from the window
            v0, d0 = eta(base_t)
            ve = v0 + (edge - base_t) * d0
            worst_v = max(worst_v, abs(vs - ve) / max(1.0, abs(ve)))
            worst_d = max(worst_d, abs(ds - d0))
        ts = np.linspace(b.n - b.delta, b.n + b.delta, 21)
        _, ds = sigma.evaluate(ts)
        worst_res = max(worst_res, float(np.max(_off_segment(ds, b.d1, b.d2))))
    budget_ok = True
    worst_ratio = 0.0
    for n in range(seq.n_min, seq.n_max):
        ts = np.linspace(n, n + 1, 1001)
        vs, _ = sigma.evaluate(ts)
        ve, _ = eta.evaluate(ts)
        dev = float(np.max(np.abs(vs - ve)))
        worst_ratio = max(worst_ratio, dev * (abs(n) + 1))
        budget_ok &= dev < 1.0 / (abs(n) + 1)
    _, dd = sigma.evaluate(np.linspace(seq.n_min, seq.n_max, 100_001))
    min_speed = float(np.min(np.abs(dd)))
    ok = worst_v <= 1e-12 and worst_d <= 1e-12 and worst_res < 1e-12 and budget_ok and min_speed > 0
    record(5, ok, f"boundary value/deriv mismatch {worst_v:.1e}/{worst_d:.1e}, derivative off segment "
                  f"{worst_res:.1e}, max dev*(|n|+1) {worst_ratio:.3f}, min |sigma'| {min_speed:.2e}")
    assert ok


# 6 ---------------------------------------------------------------------------

@pytest.fixture(scope="module")
def certified_128(seg_circle_128):
    _, _, seq, _, markers, sigma = seg_circle_128
    t0 = time.perf_counter()
    cert = approx.certify(sigma, markers, 127.0, approx.ErrorSchedule(), 4096, 0.2)
    return cert, time.perf_counter() - t0


def test_06_polynomial_surrogate(seg_circle_128, certified_128):
    sigma = seg_circle_128[-1]
    cert, elapsed = certified_128
    f = cert.approximant
    fine_v, fine_d = approx.reverify(f, sigma, cert.schedule)
    ok = (cert.fit_ok and f.cert_value_err <= 1 and f.cert_deriv_err <= 1 and fine_v <= 1 and fine_d <= 1
          and cert.report.passed and f.degree <= 4096 and elapsed < 60)
    record(6, ok, f"degree {f.degree}, weighted errors value {f.cert_value_err:.3g} / deriv {f.cert_deriv_err:.3g} "
                  f"(10x grid {fine_v:.3g} / {fine_d:.3g}), markers within 0.2: {cert.report.passed}, {elapsed:.1f}s")
    assert ok


# 7 ---------------------------------------------------------------------------

def test_07_cluster_convergence(seg_circle_128):
    kminus, kplus, seq, _, _, sigma = seg_circle_128
    N = 128
    eps = float(approx.ErrorSchedule()(np.array([N - 2]))[0])
    lines, ok = [], True
    for side, spec in (("plus", kplus), ("minus", kminus)):
        j = seq.last_block(side)
        window = analysis.block_window(seq, side, j)
        rep = analysis.cluster_estimate(sigma, window, int(8 * (window[1] - window[0])) + 1, cn.net_at(spec, j))
        bound = analysis.convergence_bound(j, N, eps)
        ok &= rep.hausdorff_to_target < bound
        lines.append(f"{side} j={j} H={rep.hausdorff_to_target:.4f} < {bound:.4f}")
    record(7, ok, "; ".join(lines))
    assert ok


# 8 ---------------------------------------------------------------------------

def test_08_divergence_diagnostic(seg_circle_128, certified_128):
    markers = seg_circle_128[4]
    cert, _ = certified_128
    f = cert.approximant
    rep = analysis.tangent_divergence_report(f, approx.markers_in_window(markers, f.T), 0.2)
    line = analysis.FunctionCurve(lambda t: t + 0j, lambda t: np.ones_like(t) + 0j, (-200.0, 200.0))
    control = analysis.tangent_divergence_report(line, markers, 0.2)
    ok = rep.passed and not control.passed
    osc = [s.oscillations for s in rep.sides]
    record(8, ok, f"pipeline report passed={rep.passed} (oscillations {osc}); straight line passed={control.passed}")
    assert ok


# 9 ---------------------------------------------------------------------------

def test_09_gallery():
    details, ok = [], True
    for k in (1, 2, 3, 4):
        _, rep = cli.gallery_report(k)
        fd = rep["finite_difference"]["max_rel_err"]
        ends = max(e["distance"] for e in rep["ends"])
        ok &= fd < 1e-6 and ends < 1e-3
        details.append(f"ex{k} fd {fd:.1e} ends {ends:.1e}")
    ex1 = gallery.example_curve(1)
    r = analysis.cluster_estimate(ex1, (10, 20), 1001, [0j])
    ok &= r.hausdorff_to_target <= 2 * math.exp(-100) * (1 + 1e-9)
    ex4 = gallery.example_curve(4)
    prof = analysis.tangent_arg_profile(ex4, np.linspace(0, 10, 20001))
    growth = prof[-1] - prof[0]
    expected = 10 + math.atan2(1, 20) - math.pi / 2
    ok &= abs(growth - expected) < 1e-6
    details.append(f"ex1 terminal {r.hausdorff_to_target:.2e}; ex4 growth err {abs(growth - expected):.1e}")
    record(9, ok, "; ".join(details))
    assert ok


# 10 --------------------------------------------------------------------------

def test_10_strip_transfer():
    rng = np.random.default_rng(10)
    c = 0.5
    h = gallery.StripMap(c)
    w = rng.uniform(-5, 5, 1000) + 1j * rng.uniform(-0.99 * c, 0.99 * c, 1000)
    rt = float(np.max(np.abs(h.forward(h.inverse(w)) - w)))
    res = cli.run_construct(cli.RunConfig(cn.Singleton(-1 + 0j), cn.Singleton(1 + 0j), N=16, T=8.0))
    f = res.certification.approximant
    u = rng.uniform(-10, 10, 1000)
    _, gp = gallery.transfer(f, c, u)
    _, fp = f.evaluate(h.forward(u).real)
    arg_err = float(np.max(np.abs(approx.wrap_angle(np.angle(gp) - np.angle(fp)))))
    slit = abs(np.sinh(1j * math.pi / 2) - 1j)
    ok = rt < 1e-12 and arg_err < 1e-12 and slit <= np.finfo(float).eps
    record(10, ok, f"round trip {rt:.1e}, arg identity {arg_err:.1e}, sinh(i pi/2) - i = {slit:.1e}")
    assert ok


# 11 --------------------------------------------------------------------------

def _run_cli(args, out):
    code = cli.main(args + ["--out", str(out)])
    return code, sorted(os.listdir(out))


def test_11_determinism(tmp_path):
    km = '{"kind":"segment","a":0,"b":1}'
    kp = '{"kind":"circle","center":0,"radius":1}'
    args = ["construct", "--kminus", km, "--kplus", kp, "--n", "32", "--seed", "3", "--emit", "csv,svg,report"]
    c1, f1 = _run_cli(args, tmp_path / "a")
    c2, f2 = _run_cli(args, tmp_path / "b")
    g1 = _run_cli(["gallery", "2"], tmp_path / "g1")
    g2 = _run_cli(["gallery", "2"], tmp_path / "g2")
    same = f1 == f2 and all(filecmp.cmp(tmp_path / "a" / n, tmp_path / "b" / n, shallow=False) for n in f1)
    same &= g1 == g2 and all(filecmp.cmp(tmp_path / "g1" / n, tmp_path / "g2" / n, shallow=False) for n in g1[1])
    ok = same and c1 == c2 and len(f1) == 7
    record(11, ok, f"{len(f1)} construct + {len(g1[1])} gallery artifacts byte-identical across runs: {same}")
    assert ok
