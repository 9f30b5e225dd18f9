"""Acceptance criteria, one test per criterion.

Each test records ``RESULTS[key] = (passed, detail)``; conftest prints one
line per criterion at the end of the run.
"""
import json
import os
import subprocess
import sys
import textwrap
import time

import numpy as np
import pytest

from _graphs import ids, random_graph, toy_graph
from temporal_peel.components import build_static_representation, component_core_check, delta_connected_components
from temporal_peel.decomposition import DecompositionResult, extract_subgraph, kd_core_decompose, kd_truss_decompose
from temporal_peel.generate import planted_label_graph, random_temporal_graph
from temporal_peel.graph import TemporalGraph, max_delta, write_edge_list
from temporal_peel.oracle import oracle_components, oracle_decompose, static_edge_core
from temporal_peel.stats import component_label_report, iet_percentiles, inter_event_times

RESULTS: dict = {}

FAST = {"core": kd_core_decompose, "truss": kd_truss_decompose}


def record(key, ok, detail=""):
    RESULTS[key] = (bool(ok), detail)
    print(f"criterion {key}: {'PASS' if ok else 'FAIL'}  {detail}")
    return bool(ok)


def random_instances(count, seed, **kw):
    rng = np.random.default_rng(seed)
    out = []
    for _ in range(count):
        g = random_graph(rng, **kw)
        lo, hi = g.span
        out.append((g, int(rng.integers(0, hi - lo + 1))))
    return out


# instances shared by criteria 2 and 5
INSTANCES = random_instances(200, 20240601, max_n=20, max_m=120, max_span=60)


# -- 1 ------------------------------------------------------------------------------


def test_criterion_1_toy_golden():
    kd_core_decompose(toy_graph(), 1)       # compile kernels outside the timed region
    kd_truss_decompose(toy_graph(), 1)
    delta_connected_components(toy_graph(), 1)

    start = time.perf_counter()
    g = toy_graph()
    checks = {}

    c2 = kd_core_decompose(g, 2).values
    core22 = [("a", "b", 1), ("a", "c", 1), ("b", "c", 3), ("b", "c", 8), ("c", "d", 6), ("b", "d", 6)]
    checks["1.a"] = set(np.flatnonzero(c2 == 2)) == ids(g, core22) and np.count_nonzero(c2 == 1) == 6

    c5 = kd_core_decompose(g, 5).values
    checks["1.b"] = (
        set(np.flatnonzero(c5 == 3)) == ids(g, [("a", "b", 1), ("a", "c", 1), ("b", "c", 3), ("a", "d", 4),
                                               ("c", "d", 6), ("b", "d", 6), ("b", "c", 8)])
        and set(np.flatnonzero(c5 == 2)) == ids(g, [("a", "b", 20), ("c", "d", 20), ("a", "c", 22), ("b", "d", 23)])
        and set(np.flatnonzero(c5 == 1)) == ids(g, [("a", "d", 10)])
    )

    t5 = kd_truss_decompose(g, 5).values
    checks["1.c"] = set(np.flatnonzero(t5 >= 2)) == ids(g, [("a", "b", 1), ("a", "c", 1), ("b", "c", 3),
                                                           ("a", "d", 4), ("c", "d", 6), ("b", "d", 6)])

    sub = extract_subgraph(g, kd_core_decompose(g, 2), 2)
    comps = {frozenset(sub.edge_origin[list(c)].tolist()) for c in delta_connected_components(sub, 2).as_sets()}
    checks["1.d"] = comps == {frozenset(ids(g, [("a", "b", 1), ("b", "c", 3), ("a", "c", 1)])),
                              frozenset(ids(g, [("b", "c", 8), ("c", "d", 6), ("b", "d", 6)]))}

    rep = build_static_representation(sub, 2)
    labels = rep.time_node_labels(sub)
    warps = {frozenset((labels[i], labels[j])) for i, j in rep.warp_edges}
    checks["1.e"] = rep.n_time_nodes == 10 and warps == {
        frozenset({("b", 1), ("b", 3)}), frozenset({("b", 6), ("b", 8)}),
        frozenset({("c", 1), ("c", 3)}), frozenset({("c", 6), ("c", 8)}),
    }
    elapsed = time.perf_counter() - start

    for key, ok in checks.items():
        record(key, ok, "exact match" if ok else "mismatch")
    ok = record("1", all(checks.values()) and elapsed < 1.0, f"{elapsed:.3f}s (limit 1s)")
    assert ok


# -- 2 ------------------------------------------------------------------------------


def test_criterion_2_oracle_equivalence():
    start = time.perf_counter()
    bad = []
    for i, (g, delta) in enumerate(INSTANCES):
        for kind, fast in FAST.items():
            if not np.array_equal(fast(g, delta).values, oracle_decompose(g, delta, kind).values):
                bad.append((i, kind))
        if delta_connected_components(g, delta).as_sets() != oracle_components(g, delta).as_sets():
            bad.append((i, "components"))
    elapsed = time.perf_counter() - start
    ok = record("2", not bad and elapsed < 60,
                f"{len(INSTANCES)} instances x (core, truss, components), {len(bad)} mismatches, "
                f"{elapsed:.1f}s (limit 60s)")
    assert ok, bad[:5]


# -- 3 ------------------------------------------------------------------------------


def test_criterion_3_static_reduction():
    bad = 0
    instances = random_instances(60, 77, max_n=15, max_m=80, max_span=40)
    for g, _ in instances:
        bad += not np.array_equal(kd_core_decompose(g, max_delta(g)).values, static_edge_core(g))
    ok = record("3", bad == 0, f"{len(instances)} multigraphs at delta=max_delta, {bad} mismatches")
    assert ok


# -- 4 ------------------------------------------------------------------------------


def test_criterion_4_containment():
    rng = np.random.default_rng(4)
    value_bad = set_bad = pairs = 0
    for g, _ in random_instances(50, 44, max_n=15, max_m=80, max_span=40):
        lo, hi = g.span
        deltas = sorted(set(rng.integers(0, hi - lo + 2, 4).tolist()))
        for kind, fast in FAST.items():
            res = {d: fast(g, d) for d in deltas}
            for d_small in deltas:
                for d_big in deltas:
                    if d_small > d_big:
                        continue
                    pairs += 1
                    small, big = res[d_small], res[d_big]
                    value_bad += not np.all(small.values <= big.values)
                    # (k', delta') inside (k, delta) whenever k <= k' and delta' <= delta
                    for k in range(0, big.max_value + 1):
                        outer = set(big.members(k).tolist())
                        for k2 in range(k, small.max_value + 1):
                            set_bad += not set(small.members(k2).tolist()) <= outer
    ok = record("4", value_bad == 0 and set_bad == 0,
                f"{pairs} (delta', delta) pairs, {value_bad} value violations, {set_bad} containment violations")
    assert ok


# -- 5 ------------------------------------------------------------------------------


def test_criterion_5_component_cores():
    checked = failed = 0
    for g, delta in INSTANCES:
        for kind, fast in FAST.items():
            r = fast(g, delta)
            for k in range(1, r.max_value + 1):
                sub = extract_subgraph(g, r, k)
                sub_r = DecompositionResult(kind, delta, r.values[sub.edge_origin])
                checked += 1
                failed += not component_core_check(sub, delta_connected_components(sub, delta), sub_r, k)
    ok = record("5", failed == 0 and checked > 0, f"{checked} (k, delta) extractions, {failed} failures")
    assert ok


# -- 6 ------------------------------------------------------------------------------


def test_criterion_6_isomorphism_plateau():
    """Core values at any two deltas strictly between consecutive distinct IET values."""
    differing_graphs = gaps_checked = 0
    example = None
    for gi, (g, _) in enumerate(random_instances(20, 66, max_n=20, max_m=120, max_span=60)):
        values = np.unique(inter_event_times(g))
        graph_bad = False
        for a, b in zip(values, values[1:]):
            if b - a < 3:
                continue            # fewer than two integers strictly between
            gaps_checked += 1
            d1, d2 = int(a) + 1, int(b) - 1
            if not np.array_equal(kd_core_decompose(g, d1).values, kd_core_decompose(g, d2).values):
                graph_bad = True
                example = example or (gi, d1, d2, int(a), int(b))
        differing_graphs += graph_bad
    detail = f"20 graphs, {gaps_checked} IET intervals, {differing_graphs} graphs with differing results"
    if example:
        detail += f" (e.g. graph {example[0]}: delta {example[1]} vs {example[2]} between IETs {example[3]}, {example[4]})"
    ok = record("6", differing_graphs == 0 and gaps_checked > 0, detail)
    assert ok


def _same_node_gaps(g):
    gaps = set()
    for x in range(g.n):
        ts = g.incidence(x)[1]
        gaps.update(np.unique(ts[None, :] - ts[:, None]).tolist())
    return np.array(sorted(v for v in gaps if v >= 0))


def test_criterion_6_supplement_pairwise_gaps():
    """Supplementary, not a substitute for 6: plateaus bounded by all same-node gaps."""
    differing = intervals = 0
    for g, _ in random_instances(20, 66, max_n=20, max_m=120, max_span=60):
        values = _same_node_gaps(g)
        for a, b in zip(values, values[1:]):
            intervals += 1
            for kind, fast in FAST.items():
                differing += not np.array_equal(fast(g, int(a)).values, fast(g, int(b) - 1).values)
    ok = record("6.b", differing == 0, f"supplementary: same 20 graphs, {intervals} intervals between "
                                       f"same-node gaps, core and truss, {differing} differing")
    assert ok


# -- 7 ------------------------------------------------------------------------------


def test_criterion_7_order_independence():
    rng = np.random.default_rng(7)
    g = random_graph(rng, max_n=20, max_m=120, max_span=60)
    while g.m < 60:
        g = random_graph(rng, max_n=20, max_m=120, max_span=60)
    delta = 10
    base = {kind: fast(g, delta).values for kind, fast in FAST.items()}
    bad = 0
    for _ in range(10):
        perm = rng.permutation(g.m)
        h = TemporalGraph(g.src[perm], g.dst[perm], g.t[perm], n=g.n)
        for kind, fast in FAST.items():
            back = np.empty(g.m, np.int64)
            back[perm] = fast(h, delta).values
            bad += not np.array_equal(back, base[kind])
    ok = record("7", bad == 0, f"10 permutations of a {g.m}-edge graph, {bad} differing arrays")
    assert ok


# -- 8 ------------------------------------------------------------------------------

_SCALE_SCRIPT = textwrap.dedent("""
    import json, resource, sys, time
    from temporal_peel.decomposition import kd_core_decompose
    from temporal_peel.graph import read_edge_list
    from temporal_peel.stats import iet_percentiles
    start = time.perf_counter()
    g, _ = read_edge_list(sys.argv[1])
    delta = iet_percentiles(g, [0.5]).percentiles[0.5]
    res = kd_core_decompose(g, delta)
    elapsed = time.perf_counter() - start
    peak_kb = resource.getrusage(resource.RUSAGE_SELF).ru_maxrss
    print(json.dumps({"m": g.m, "delta": delta, "seconds": elapsed, "peak_mb": peak_kb / 1024,
                      "max_core": res.max_value}))
""")

_DOUBLING_SCRIPT = textwrap.dedent("""
    import json, time
    from temporal_peel.decomposition import kd_core_decompose
    from temporal_peel.generate import random_temporal_graph
    from temporal_peel.stats import iet_percentiles
    span = 1_000_000
    small = random_temporal_graph(50_000, 500_000, span, seed=11)
    big = random_temporal_graph(100_000, 1_000_000, span, seed=12)
    delta = iet_percentiles(small, [0.5]).percentiles[0.5]
    kd_core_decompose(small, delta)
    times = {}
    for name, g in (("small", small), ("big", big)):
        runs = []
        for _ in range(3):
            t0 = time.perf_counter()
            kd_core_decompose(g, delta)
            runs.append(time.perf_counter() - t0)
        times[name] = min(runs)
    print(json.dumps({"delta": delta, "small": times["small"], "big": times["big"]}))
""")


def _run_script(script, *args):
    env = dict(os.environ)
    proc = subprocess.run([sys.executable, "-c", script, *args], capture_output=True, text=True,
                          timeout=600, env=env)
    assert proc.returncode == 0, proc.stderr[-2000:]
    return json.loads(proc.stdout.strip().splitlines()[-1])


@pytest.mark.slow
def test_criterion_8_scale(tmp_path):
    path = tmp_path / "big.txt"
    g = random_temporal_graph(100_000, 1_000_000, 1_000_000, seed=8)
    with open(path, "w") as fh:
        write_edge_list(g, fh)
    del g
    _run_script(_SCALE_SCRIPT, str(path))              # populate the kernel cache
    run = _run_script(_SCALE_SCRIPT, str(path))
    ok_a = record("8.a", run["m"] == 1_000_000 and run["seconds"] < 60 and run["peak_mb"] < 1024,
                  f"m={run['m']} delta=p50={run['delta']} load+p50+core {run['seconds']:.1f}s (limit 60s), "
                  f"peak RSS {run['peak_mb']:.0f} MB (limit 1024)")
    dbl = _run_script(_DOUBLING_SCRIPT)
    ratio = dbl["big"] / dbl["small"]
    ok_b = record("8.b", ratio < 3, f"core at delta={dbl['delta']}: m=5e5 {dbl['small']:.2f}s, "
                                    f"m=1e6 {dbl['big']:.2f}s, ratio {ratio:.2f} (limit 3)")
    ok = record("8", ok_a and ok_b, "10^6 edges within budget, near-linear doubling" if ok_a and ok_b else "see 8.a/8.b")
    assert ok


# -- 9 ------------------------------------------------------------------------------


def test_criterion_9_label_pipeline():
    wrong = planted_total = 0
    census_ok = True
    for seed in range(5):
        g, planted = planted_label_graph(seed=seed)
        delta = iet_percentiles(g, [0.5]).percentiles[0.5]
        part = delta_connected_components(g, delta)
        report = component_label_report(g, part)
        census_ok &= report.total_edges() == g.m
        for p in planted:
            planted_total += 1
            cids = set(part.component_of[p.edges].tolist())
            if len(cids) != 1:
                wrong += 1
                continue
            cid = cids.pop()
            row = report.rows[cid]
            wrong += not (row.homophily == p.homophily and row.edges == len(p.edges))
    ok = record("9", wrong == 0 and census_ok,
                f"{planted_total} planted components over 5 graphs, {wrong} misclassified, census sums to m: {census_ok}")
    assert ok
