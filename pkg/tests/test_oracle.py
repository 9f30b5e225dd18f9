import numpy as np
import pytest

from _graphs import ids, random_graph
from temporal_peel.graph import TemporalGraph
from temporal_peel.oracle import (
    COMPONENTS_LIMIT,
    DECOMPOSE_LIMIT,
    OracleGuardError,
    fixpoint_core,
    fixpoint_truss,
    oracle_components,
    oracle_decompose,
    static_edge_core,
    static_truss,
)


def test_truss_fixpoint_example(toy):
    expected = ids(toy, [("a", "b", 1), ("a", "c", 1), ("b", "c", 3), ("b", "c", 8), ("c", "d", 6), ("b", "d", 6)])
    assert fixpoint_truss(toy, 2, 1) == expected


def test_core_fixpoint_empty_above_max(toy):
    assert fixpoint_core(toy, 5, 4) == frozenset()
    assert fixpoint_core(toy, 5, 1) == frozenset(range(toy.m))


@pytest.mark.parametrize("seed", range(8))
def test_fixpoint_independent_of_removal_order(seed):
    rng = np.random.default_rng(seed)
    g = random_graph(rng, max_n=8, max_m=30, max_span=20)
    delta = int(rng.integers(0, 20))
    for k in (1, 2, 3):
        assert fixpoint_core(g, delta, k, rng=rng) == fixpoint_core(g, delta, k)
        assert fixpoint_truss(g, delta, k, rng=rng) == fixpoint_truss(g, delta, k)


@pytest.mark.parametrize("seed", range(8))
def test_decompose_thresholds_match_fixpoints(seed):
    rng = np.random.default_rng(100 + seed)
    g = random_graph(rng, max_n=8, max_m=30, max_span=20)
    delta = int(rng.integers(0, 20))
    for kind, fix in (("core", fixpoint_core), ("truss", fixpoint_truss)):
        values = oracle_decompose(g, delta, kind).values
        for k in range(0, int(values.max(initial=0)) + 2):
            assert set(np.flatnonzero(values >= k).tolist()) == fix(g, delta, k)


def test_trace_covers_every_edge(toy):
    res = oracle_decompose(toy, 5, "core")
    assert sorted(e for e, _ in res.trace) == list(range(toy.m))
    assert [v for _, v in res.trace] == sorted(v for _, v in res.trace)


def test_guards():
    big = TemporalGraph(np.zeros(DECOMPOSE_LIMIT + 1, np.int64), np.ones(DECOMPOSE_LIMIT + 1, np.int64),
                        np.arange(DECOMPOSE_LIMIT + 1))
    with pytest.raises(OracleGuardError):
        oracle_decompose(big, 1, "core")
    with pytest.raises(OracleGuardError):
        fixpoint_truss(big, 1, 1)
    mid = TemporalGraph(np.zeros(COMPONENTS_LIMIT + 1, np.int64), np.ones(COMPONENTS_LIMIT + 1, np.int64),
                        np.arange(COMPONENTS_LIMIT + 1))
    with pytest.raises(OracleGuardError):
        oracle_components(mid, 1)


def test_empty_graph():
    g = TemporalGraph([], [], [])
    assert len(oracle_decompose(g, 1, "truss").values) == 0
    assert len(oracle_components(g, 1)) == 0
    assert fixpoint_core(g, 1, 1) == frozenset()


def test_static_references():
    # triangle plus a doubled edge a-b and a pendant c-d
    g = TemporalGraph.from_edges([("a", "b", 0), ("a", "b", 5), ("b", "c", 1), ("a", "c", 2), ("c", "d", 3)])
    assert static_edge_core(g).tolist() == [2, 2, 2, 2, 1]
    # the a-b parallels each close one triangle; b-c and a-c close two
    assert static_truss(g).tolist() == [1, 1, 1, 1, 0]
