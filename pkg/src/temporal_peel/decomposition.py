"""Monotone edge-weight peeling: (k, delta)-cores and (k, delta)-trusses."""
from __future__ import annotations

import heapq
from collections import defaultdict
from dataclasses import dataclass, field
from typing import IO, Callable, Collection, Iterable, Optional

import numpy as np

from . import _kernels
from .graph import TemporalGraph, delta_incident_edges

CORE = "core"
TRUSS = "truss"
KINDS = (CORE, TRUSS)


@dataclass
class DecompositionResult:
    """Per-edge core or truss numbers for one ``delta``.

    ``values[i]`` belongs to edge id ``i`` of the graph the result was
    computed on.  ``order`` is the peeling order, when known.
    """

    kind: str
    delta: int
    values: np.ndarray
    order: Optional[np.ndarray] = field(default=None, repr=False)

    def __eq__(self, other):
        if not isinstance(other, DecompositionResult):
            return NotImplemented
        return (self.kind == other.kind and self.delta == other.delta
                and np.array_equal(self.values, other.values))

    @property
    def max_value(self) -> int:
        return int(self.values.max()) if len(self.values) else 0

    def members(self, k: int, exact: bool = False) -> np.ndarray:
        """Edge ids with value ``>= k`` (or ``== k`` when ``exact``)."""
        mask = self.values == k if exact else self.values >= k
        return np.flatnonzero(mask)


def _clamp(g: TemporalGraph, delta: int) -> int:
    # any delta beyond the full time span behaves identically; clamping keeps t +/- delta in int64
    if delta < 0:
        raise ValueError("delta must be non-negative")
    if g.m == 0:
        return int(delta)
    lo, hi = g.span
    return int(min(delta, hi - lo))


def _live_contains(live, e) -> bool:
    return live is None or e in live


# -- per-edge weights (reference path) ----------------------------------------


def delta_degree(g: TemporalGraph, e: int, live: Optional[Collection[int]], delta: int) -> int:
    """Smaller endpoint count of live edges within ``delta`` of edge ``e``.

    ``live=None`` means every edge of ``g``.  ``e`` counts itself at both ends.
    """
    if not _live_contains(live, e):
        raise ValueError(f"edge {e} is not in the live edge set")
    t = int(g.t[e])
    counts = []
    for x in (int(g.src[e]), int(g.dst[e])):
        near = delta_incident_edges(g, x, t, delta)
        counts.append(len(near) if live is None else sum(1 for f in near if f in live))
    return min(counts)


def triangle_pairs(g: TemporalGraph, e: int, live: Optional[Collection[int]], delta: int) -> list[tuple[int, int]]:
    """Live partner pairs ``(f_u, f_v)`` closing a temporally local triangle with ``e``.

    ``f_u = ({u, w}, t1)`` and ``f_v = ({v, w}, t2)`` on a third node ``w``, with
    all three pairwise timestamp gaps at most ``delta``.
    """
    u, v, t = int(g.src[e]), int(g.dst[e]), int(g.t[e])
    by_far_end = defaultdict(list)
    for f in delta_incident_edges(g, v, t, delta):
        w = int(g.src[f]) if int(g.dst[f]) == v else int(g.dst[f])
        if w != u and _live_contains(live, f):
            by_far_end[w].append(f)
    pairs = []
    for f in delta_incident_edges(g, u, t, delta):
        w = int(g.src[f]) if int(g.dst[f]) == u else int(g.dst[f])
        if w == v or not _live_contains(live, f):
            continue
        for h in by_far_end.get(w, ()):
            if abs(int(g.t[f]) - int(g.t[h])) <= delta:
                pairs.append((f, h))
    return pairs


def delta_support(g: TemporalGraph, e: int, live: Optional[Collection[int]], delta: int) -> int:
    """Number of temporally local triangles through edge ``e`` among live edges."""
    if not _live_contains(live, e):
        raise ValueError(f"edge {e} is not in the live edge set")
    return len(triangle_pairs(g, e, live, delta))


# -- generic framework ---------------------------------------------------------


@dataclass
class EdgeWeightFunction:
    """A monotone edge weight plus the edges whose weight a removal may change.

    ``evaluate(e, live)`` and ``affected(removed, live)`` both receive the set
    of edge ids still present.
    """

    evaluate: Callable[[int, Collection[int]], int]
    affected: Callable[[int, Collection[int]], Iterable[int]]
    kind: str = "custom"
    delta: int = 0


def degree_weight(g: TemporalGraph, delta: int) -> EdgeWeightFunction:
    def affected(e, live):
        t = int(g.t[e])
        near = set(delta_incident_edges(g, int(g.src[e]), t, delta))
        near.update(delta_incident_edges(g, int(g.dst[e]), t, delta))
        return [f for f in near if f in live]

    return EdgeWeightFunction(lambda e, live: delta_degree(g, e, live, delta), affected, CORE, delta)


def support_weight(g: TemporalGraph, delta: int) -> EdgeWeightFunction:
    def affected(e, live):
        out = set()
        for f, h in triangle_pairs(g, e, live, delta):
            out.add(f)
            out.add(h)
        return out

    return EdgeWeightFunction(lambda e, live: delta_support(g, e, live, delta), affected, TRUSS, delta)


def constant_weight(value: int = 1) -> EdgeWeightFunction:
    return EdgeWeightFunction(lambda e, live: value, lambda e, live: ())


def generic_decompose(g: TemporalGraph, phi: EdgeWeightFunction) -> DecompositionResult:
    """Reference peeling for any monotone edge weight.

    Repeatedly removes a minimum-weight edge (lowest id on ties) and
    re-evaluates the affected edges, never letting a weight fall below the
    level currently being peeled.
    """
    live = set(range(g.m))
    c = np.array([phi.evaluate(e, live) for e in range(g.m)], dtype=np.int64)
    heap = [(int(c[e]), e) for e in range(g.m)]
    heapq.heapify(heap)
    order = []
    while heap:
        val, e = heapq.heappop(heap)
        if e not in live or val != c[e]:
            continue
        live.discard(e)
        order.append(e)
        for f in phi.affected(e, live):
            if c[f] > c[e]:
                new = max(int(c[e]), int(phi.evaluate(f, live)))
                if new != c[f]:
                    c[f] = new
                    heapq.heappush(heap, (new, f))
    return DecompositionResult(phi.kind, phi.delta, c, np.array(order, dtype=np.int64))


# -- production path ------------------------------------------------------------


def kd_core_decompose(g: TemporalGraph, delta: int) -> DecompositionResult:
    """Core number of every edge for the given ``delta``."""
    if g.m == 0:
        return DecompositionResult(CORE, int(delta), np.zeros(0, np.int64), np.zeros(0, np.int64))
    dc = _clamp(g, delta)
    values, order = _kernels.core_peel(g.src, g.dst, g.t, g.offsets, g.inc_edge, g.inc_time, dc)
    return DecompositionResult(CORE, int(delta), values, order)


def kd_truss_decompose(g: TemporalGraph, delta: int) -> DecompositionResult:
    """Truss number of every edge for the given ``delta``."""
    if g.m == 0:
        return DecompositionResult(TRUSS, int(delta), np.zeros(0, np.int64), np.zeros(0, np.int64))
    dc = _clamp(g, delta)
    values, order = _kernels.truss_peel(g.src, g.dst, g.t, g.offsets, g.inc_edge, g.inc_time,
                                        g.inc_other, dc)
    return DecompositionResult(TRUSS, int(delta), values, order)


def decompose(g: TemporalGraph, delta: int, kind: str = CORE) -> DecompositionResult:
    if kind == CORE:
        return kd_core_decompose(g, delta)
    if kind == TRUSS:
        return kd_truss_decompose(g, delta)
    raise ValueError(f"unknown decomposition kind {kind!r}")


def all_weights(g: TemporalGraph, delta: int, kind: str, group=None) -> np.ndarray:
    """Weight of every edge against the full edge set (or its own group only)."""
    if g.m == 0:
        return np.zeros(0, np.int64)
    dc = _clamp(g, delta)
    group = np.zeros(g.m, np.int64) if group is None else np.asarray(group, dtype=np.int64)
    if kind == CORE:
        a, b = _kernels.window_counts(g.src, g.dst, g.t, g.offsets, g.inc_edge, g.inc_time, dc, group)
        return np.minimum(a, b)
    if kind == TRUSS:
        return _kernels.triangle_support(g.src, g.dst, g.t, g.offsets, g.inc_edge, g.inc_time,
                                         g.inc_other, dc, np.zeros(g.m, np.bool_), group)
    raise ValueError(f"unknown decomposition kind {kind!r}")


def extract_subgraph(g: TemporalGraph, result: DecompositionResult, k: int, mode: str = "at_least") -> TemporalGraph:
    """The (k, delta)-core/truss (``at_least``) or its shell (``exactly``).

    Edge and node ids of the returned graph are renumbered; ``edge_origin``
    and ``node_origin`` map them back.
    """
    if len(result.values) != g.m:
        raise ValueError("result does not belong to this graph")
    if mode not in ("at_least", "exactly"):
        raise ValueError(f"unknown mode {mode!r}")
    return g.edge_subgraph(result.members(k, exact=mode == "exactly"))


# -- serialization ----------------------------------------------------------------


def write_result(g: TemporalGraph, result: DecompositionResult, stream: IO[str],
                 extra_header: Optional[dict] = None) -> None:
    """Header ``# kind=.. delta=..`` then ``edge_id u v t value`` rows, tab-separated."""
    stream.write(f"# kind={result.kind} delta={result.delta}\n")
    for key, val in (extra_header or {}).items():
        stream.write(f"# {key}={val}\n")
    ids = g.original_edge_ids()
    tok = g.tokens
    for i in range(g.m):
        stream.write(f"{ids[i]}\t{tok[g.src[i]]}\t{tok[g.dst[i]]}\t{g.t[i]}\t{result.values[i]}\n")


def read_result(stream: IO[str]) -> tuple[DecompositionResult, np.ndarray]:
    """Parse :func:`write_result` output; returns the result and the edge-id column."""
    kind, delta = None, None
    ids, values = [], []
    for line in stream:
        line = line.rstrip("\n")
        if line.startswith("#"):
            for item in line[1:].split():
                key, _, val = item.partition("=")
                if key == "kind":
                    kind = val
                elif key == "delta":
                    delta = int(val)
            continue
        if not line:
            continue
        cols = line.split("\t")
        ids.append(int(cols[0]))
        values.append(int(cols[4]))
    if kind is None or delta is None:
        raise ValueError("missing '# kind=... delta=...' header")
    return DecompositionResult(kind, delta, np.array(values, dtype=np.int64)), np.array(ids, dtype=np.int64)
