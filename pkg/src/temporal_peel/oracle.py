"""Brute-force reference implementations for testing.

Nothing here touches the incidence lists or the compiled kernels: weights are
recomputed from the raw ``(src, dst, t)`` arrays on every sweep.  Size guards
keep these quadratic (or worse) routines away from real data.
"""
from __future__ import annotations

from collections import Counter, deque
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .components import EdgePartition
from .graph import TemporalGraph

DECOMPOSE_LIMIT = 10_000
COMPONENTS_LIMIT = 5_000
_CHUNK = 512


class OracleGuardError(ValueError):
    """Instance too large for a brute-force oracle."""


@dataclass
class OracleResult:
    values: np.ndarray
    trace: list = field(default_factory=list)   # (edge id, assigned value) in removal order


def _guard(g: TemporalGraph, limit: int):
    if g.m > limit:
        raise OracleGuardError(f"oracle limited to {limit} edges, graph has {g.m}")


def _degrees(g: TemporalGraph, alive: np.ndarray, delta: int) -> np.ndarray:
    """Delta-degree of each edge in ``alive`` (an index array) w.r.t. ``alive``."""
    s, d, t = g.src[alive], g.dst[alive], g.t[alive]
    out = np.empty(len(alive), np.int64)
    for lo in range(0, len(alive), _CHUNK):
        hi = lo + _CHUNK
        close = np.abs(t[lo:hi, None] - t[None, :]) <= delta
        at_u = (s[None, :] == s[lo:hi, None]) | (d[None, :] == s[lo:hi, None])
        at_v = (s[None, :] == d[lo:hi, None]) | (d[None, :] == d[lo:hi, None])
        out[lo:hi] = np.minimum((close & at_u).sum(1), (close & at_v).sum(1))
    return out


def _supports(g: TemporalGraph, alive: np.ndarray, delta: int) -> np.ndarray:
    """Delta-support of each edge in ``alive`` w.r.t. ``alive``."""
    s, d, t = g.src[alive], g.dst[alive], g.t[alive]
    out = np.empty(len(alive), np.int64)
    for i in range(len(alive)):
        u, v = s[i], d[i]
        close = np.abs(t - t[i]) <= delta
        touch_u = (s == u) | (d == u)
        touch_v = (s == v) | (d == v)
        side_u = close & touch_u & ~touch_v
        side_v = close & touch_v & ~touch_u
        far_u = np.where(s == u, d, s)[side_u]
        far_v = np.where(s == v, d, s)[side_v]
        tu, tv = t[side_u], t[side_v]
        ok = (far_u[:, None] == far_v[None, :]) & (np.abs(tu[:, None] - tv[None, :]) <= delta)
        out[i] = int(ok.sum())
    return out


_WEIGHT = {"core": _degrees, "truss": _supports}


def _peel_to_fixpoint(g, alive, delta, k, weight, rng=None, removed_log=None):
    """Drop edges with weight < k until none is left; ``alive`` is an index array."""
    while len(alive):
        w = weight(g, alive, delta)
        bad = np.flatnonzero(w < k)
        if len(bad) == 0:
            break
        if rng is not None:
            bad = bad[[rng.integers(len(bad))]]
        if removed_log is not None:
            removed_log.extend(alive[bad].tolist())
        alive = np.delete(alive, bad)
    return alive


def fixpoint_core(g: TemporalGraph, delta: int, k: int, rng: Optional[np.random.Generator] = None) -> frozenset:
    """Largest edge set in which every edge has delta-degree >= k.

    With ``rng`` one random violating edge is deleted per sweep instead of all
    of them at once.
    """
    _guard(g, DECOMPOSE_LIMIT)
    alive = _peel_to_fixpoint(g, np.arange(g.m), delta, k, _degrees, rng)
    return frozenset(alive.tolist())


def fixpoint_truss(g: TemporalGraph, delta: int, k: int, rng: Optional[np.random.Generator] = None) -> frozenset:
    """Largest edge set in which every edge has delta-support >= k."""
    _guard(g, DECOMPOSE_LIMIT)
    alive = _peel_to_fixpoint(g, np.arange(g.m), delta, k, _supports, rng)
    return frozenset(alive.tolist())


def oracle_decompose(g: TemporalGraph, delta: int, kind: str) -> OracleResult:
    """Value of each edge = largest k whose fixpoint still contains it."""
    _guard(g, DECOMPOSE_LIMIT)
    weight = _WEIGHT[kind]
    values = np.zeros(g.m, np.int64)
    trace = []
    alive = np.arange(g.m)
    k = 1
    while len(alive):
        dropped: list = []
        alive = _peel_to_fixpoint(g, alive, delta, k, weight, removed_log=dropped)
        for e in dropped:
            values[e] = k - 1
            trace.append((e, k - 1))
        k += 1
    return OracleResult(values, trace)


def oracle_components(g: TemporalGraph, delta: int) -> EdgePartition:
    """Closure of pairwise delta-incidence by breadth-first search."""
    _guard(g, COMPONENTS_LIMIT)
    s, d, t = g.src, g.dst, g.t
    share = ((s[:, None] == s[None, :]) | (s[:, None] == d[None, :])
             | (d[:, None] == s[None, :]) | (d[:, None] == d[None, :]))
    adj = share & (np.abs(t[:, None] - t[None, :]) <= delta)
    label = np.full(g.m, -1, np.int64)
    for root in range(g.m):
        if label[root] >= 0:
            continue
        label[root] = root
        queue = deque([root])
        while queue:
            x = queue.popleft()
            for y in np.flatnonzero(adj[x] & (label < 0)):
                label[y] = root
                queue.append(y)
    return EdgePartition.from_labels(delta, label)


# -- static multigraph references ------------------------------------------------


def _static_peel(g: TemporalGraph, weight) -> np.ndarray:
    values = np.zeros(g.m, np.int64)
    alive = set(range(g.m))
    k = 1
    while alive:
        while True:
            w = weight(alive)
            bad = [e for e in alive if w[e] < k]
            if not bad:
                break
            for e in bad:
                values[e] = k - 1
                alive.discard(e)
        k += 1
    return values


def static_edge_core(g: TemporalGraph) -> np.ndarray:
    """Static multigraph edge core numbers: min endpoint degree, peeled."""
    src, dst = g.src.tolist(), g.dst.tolist()

    def weight(alive):
        deg = Counter()
        for e in alive:
            deg[src[e]] += 1
            deg[dst[e]] += 1
        return {e: min(deg[src[e]], deg[dst[e]]) for e in alive}

    return _static_peel(g, weight)


def static_truss(g: TemporalGraph) -> np.ndarray:
    """Static multigraph truss numbers (triangle count per edge, peeled).

    Parallel edges are distinct, so a triangle on ``{u, v, w}`` is counted
    ``mult(u, w) * mult(v, w)`` times for an edge ``{u, v}``.
    """
    src, dst = g.src.tolist(), g.dst.tolist()

    def weight(alive):
        mult = Counter()
        nbrs: dict = {}
        for e in alive:
            a, b = src[e], dst[e]
            mult[(a, b)] += 1
            mult[(b, a)] += 1
            nbrs.setdefault(a, set()).add(b)
            nbrs.setdefault(b, set()).add(a)
        out = {}
        for e in alive:
            u, v = src[e], dst[e]
            common = (nbrs[u] & nbrs[v]) - {u, v}
            out[e] = sum(mult[(u, w)] * mult[(v, w)] for w in common)
        return out

    return _static_peel(g, weight)
