"""Delta-connected components through the static time-node representation."""
from __future__ import annotations

from collections import Counter
from dataclasses import dataclass
from typing import IO, Optional

import numpy as np

from . import _kernels
from .decomposition import DecompositionResult, _clamp, all_weights
from .graph import TemporalGraph


@dataclass
class StaticDeltaRepresentation:
    """Static graph over time-nodes ``(node, t)``.

    ``warp_edges`` join consecutive time-nodes of one node that are at most
    ``delta`` apart; ``edge_edges[i]`` joins the two time-nodes of temporal
    edge ``i``.
    """

    delta: int
    node: np.ndarray          # time-node -> graph node
    time: np.ndarray          # time-node -> timestamp
    warp_edges: np.ndarray    # (k, 2) time-node pairs
    edge_edges: np.ndarray    # (m, 2) time-node pairs, row i from edge i

    @property
    def n_time_nodes(self) -> int:
        return len(self.node)

    def time_node_labels(self, g: TemporalGraph) -> list[tuple[str, int]]:
        return [(g.tokens[x], int(t)) for x, t in zip(self.node, self.time)]


@dataclass
class EdgePartition:
    """Disjoint edge-id sets covering every edge.

    Components are ordered by their smallest edge id; ids inside a component
    are ascending.
    """

    delta: int
    components: list
    component_of: np.ndarray

    def __len__(self):
        return len(self.components)

    def as_sets(self) -> list[frozenset]:
        return [frozenset(c.tolist()) for c in self.components]

    def sizes(self) -> np.ndarray:
        return np.array([len(c) for c in self.components], dtype=np.int64)

    @classmethod
    def from_labels(cls, delta: int, labels) -> "EdgePartition":
        """Canonical partition from any per-edge class labels."""
        labels = np.asarray(labels)
        m = len(labels)
        if m == 0:
            return cls(int(delta), [], np.zeros(0, np.int64))
        _, first, inverse = np.unique(labels, return_index=True, return_inverse=True)
        # rank classes by their first (smallest) edge id
        rank = np.empty(len(first), np.int64)
        rank[np.argsort(first, kind="stable")] = np.arange(len(first))
        component_of = rank[inverse.ravel()]
        order = np.argsort(component_of, kind="stable")
        bounds = np.cumsum(np.bincount(component_of, minlength=len(first)))[:-1]
        components = np.split(order.astype(np.int64), bounds)
        return cls(int(delta), components, component_of.astype(np.int64))


def build_static_representation(g: TemporalGraph, delta: int) -> StaticDeltaRepresentation:
    if delta < 0:
        raise ValueError("delta must be non-negative")
    m = g.m
    if m == 0:
        empty = np.zeros((0, 2), np.int64)
        return StaticDeltaRepresentation(int(delta), np.zeros(0, np.int64), np.zeros(0, np.int64), empty, empty)
    # incidence entries are sorted by (node, time, edge); one time-node per distinct (node, time)
    inc_node = np.repeat(np.arange(g.n, dtype=np.int64), np.diff(g.offsets))
    fresh = np.ones(len(inc_node), dtype=bool)
    fresh[1:] = (inc_node[1:] != inc_node[:-1]) | (g.inc_time[1:] != g.inc_time[:-1])
    tn_of_slot = np.cumsum(fresh) - 1
    tn_node = inc_node[fresh]
    tn_time = g.inc_time[fresh]

    at_src = inc_node == g.src[g.inc_edge]
    edge_edges = np.empty((m, 2), np.int64)
    edge_edges[g.inc_edge[at_src], 0] = tn_of_slot[at_src]
    edge_edges[g.inc_edge[~at_src], 1] = tn_of_slot[~at_src]

    same_node = tn_node[1:] == tn_node[:-1]
    close = (tn_time[1:] - tn_time[:-1]) <= delta
    left = np.flatnonzero(same_node & close)
    warp = np.stack([left, left + 1], axis=1).astype(np.int64)
    return StaticDeltaRepresentation(int(delta), tn_node, tn_time, warp, edge_edges)


def delta_connected_components(g: TemporalGraph, delta: int) -> EdgePartition:
    """Partition the edges into classes of mutual delta-reachability."""
    rep = build_static_representation(g, delta)
    if g.m == 0:
        return EdgePartition(int(delta), [], np.zeros(0, np.int64))
    a = np.concatenate([rep.warp_edges[:, 0], rep.edge_edges[:, 0]])
    b = np.concatenate([rep.warp_edges[:, 1], rep.edge_edges[:, 1]])
    roots = _kernels.union_find_roots(rep.n_time_nodes, a, b)
    return EdgePartition.from_labels(delta, roots[rep.edge_edges[:, 0]])


def component_core_check(g: TemporalGraph, partition: EdgePartition, result: DecompositionResult, k: int) -> bool:
    """True iff every component alone gives each of its edges weight ``>= k``.

    The weight is the delta-degree for core results and the delta-support for
    truss results, evaluated with only the component's own edges present.
    """
    if partition.delta != result.delta:
        raise ValueError(f"partition delta {partition.delta} != result delta {result.delta}")
    if len(partition.component_of) != g.m:
        raise ValueError("partition does not cover this graph")
    if g.m == 0:
        return True
    weights = all_weights(g, result.delta, result.kind, group=partition.component_of)
    return bool(weights.min() >= k)


def write_partition(g: TemporalGraph, partition: EdgePartition, stream: IO[str],
                    extra_header: Optional[dict] = None) -> None:
    """``component_id edge_id u v t`` rows followed by a ``#``-prefixed summary block."""
    stream.write(f"# delta={partition.delta}\n")
    for key, val in (extra_header or {}).items():
        stream.write(f"# {key}={val}\n")
    ids = g.original_edge_ids()
    tok = g.tokens
    for cid, comp in enumerate(partition.components):
        for e in comp:
            stream.write(f"{cid}\t{ids[e]}\t{tok[g.src[e]]}\t{tok[g.dst[e]]}\t{g.t[e]}\n")
    hist = Counter(partition.sizes().tolist())
    stream.write(f"# components={len(partition)}\n")
    stream.write("# size\tcount\n")
    for size in sorted(hist):
        stream.write(f"# {size}\t{hist[size]}\n")


def read_partition(stream: IO[str]) -> tuple[int, dict[int, list[int]]]:
    """Parse :func:`write_partition` output into ``(delta, {component: [edge ids]})``."""
    delta = None
    comps: dict[int, list[int]] = {}
    for line in stream:
        if line.startswith("#"):
            body = line[1:].strip()
            if body.startswith("delta="):
                delta = int(body.split("=", 1)[1])
            continue
        if not line.strip():
            continue
        cid, eid = line.split("\t")[:2]
        comps.setdefault(int(cid), []).append(int(eid))
    if delta is None:
        raise ValueError("missing '# delta=' header")
    return delta, comps
