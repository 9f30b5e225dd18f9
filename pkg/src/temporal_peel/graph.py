"""Immutable temporal graph store and edge-list I/O.

Edges are kept as parallel int64 arrays (``src``, ``dst``, ``t``) indexed by a
dense edge id.  Every node additionally owns a slice of a CSR incidence table
sorted by ``(timestamp, edge id)``, which is what the peeling kernels scan.
"""
from __future__ import annotations

import gzip
import io
import logging
import os
from dataclasses import dataclass, field
from typing import IO, Iterable, Iterator, Optional, Sequence, Union

import numpy as np

log = logging.getLogger(__name__)

GZIP_MAGIC = b"\x1f\x8b"
_I64_MIN, _I64_MAX = -(2**63), 2**63 - 1

PathOrStream = Union[str, os.PathLike, IO[bytes]]


class GraphFormatError(ValueError):
    """Raised for malformed edge-list input."""

    def __init__(self, message: str, lineno: Optional[int] = None):
        self.lineno = lineno
        if lineno is not None:
            message = f"line {lineno}: {message}"
        super().__init__(message)


@dataclass(frozen=True)
class TimeInterval:
    alpha: int
    beta: int

    def __post_init__(self):
        if self.alpha > self.beta:
            raise ValueError(f"empty interval [{self.alpha}, {self.beta}]")

    def __contains__(self, t) -> bool:
        return self.alpha <= t <= self.beta

    @classmethod
    def parse(cls, text: str) -> "TimeInterval":
        """Parse ``"A:B"`` (both ends inclusive)."""
        try:
            a, b = text.split(":")
            return cls(int(a), int(b))
        except ValueError as exc:
            raise ValueError(f"bad interval {text!r}, expected A:B") from exc


@dataclass(frozen=True)
class TemporalEdge:
    id: int
    u: int
    v: int
    t: int
    label: Optional[int] = None


@dataclass
class LoadReport:
    lines: int = 0
    comments: int = 0
    edges: int = 0
    dropped_interval: int = 0
    rejected_self_loops: int = 0

    def summary(self) -> str:
        return (
            f"read {self.lines} lines: {self.edges} edges kept, "
            f"{self.dropped_interval} outside interval, "
            f"{self.rejected_self_loops} self-loops rejected, "
            f"{self.comments} comment lines"
        )


def _frozen(a, dtype=np.int64) -> np.ndarray:
    a = np.ascontiguousarray(a, dtype=dtype)
    a.setflags(write=False)
    return a


class TemporalGraph:
    """Undirected temporal multigraph with chronologically sorted incidence lists.

    Parameters
    ----------
    src, dst, t:
        Endpoint node ids and timestamps, one entry per edge.  Edge ``i`` is
        ``({src[i], dst[i]}, t[i])``.
    labels:
        Optional per-edge integer category.
    tokens:
        Original node names; defaults to ``str(node_id)``.
    n:
        Node count; defaults to ``max node id + 1``.
    edge_origin, node_origin:
        For subgraphs, the ids of the corresponding edges/nodes in the parent
        graph.
    """

    def __init__(
        self,
        src,
        dst,
        t,
        labels=None,
        tokens: Optional[Sequence[str]] = None,
        n: Optional[int] = None,
        edge_origin=None,
        node_origin=None,
    ):
        src = np.asarray(src, dtype=np.int64)
        dst = np.asarray(dst, dtype=np.int64)
        t = np.asarray(t, dtype=np.int64)
        if not (src.shape == dst.shape == t.shape) or src.ndim != 1:
            raise ValueError("src, dst and t must be 1-d arrays of equal length")
        m = len(src)
        if m and (src.min() < 0 or dst.min() < 0):
            raise ValueError("node ids must be non-negative")
        if np.any(src == dst):
            raise ValueError("self-loops are not allowed")
        if n is None:
            n = int(max(src.max(), dst.max()) + 1) if m else 0
        elif m and max(src.max(), dst.max()) >= n:
            raise ValueError("node id out of range")
        if tokens is None:
            tokens = [str(i) for i in range(n)]
        elif len(tokens) != n:
            raise ValueError("need exactly one token per node")

        self.n = int(n)
        self.m = m
        self.src = _frozen(src)
        self.dst = _frozen(dst)
        self.t = _frozen(t)
        self.labels = None if labels is None else _frozen(labels)
        if self.labels is not None and len(self.labels) != m:
            raise ValueError("need exactly one label per edge")
        self.tokens = tuple(str(x) for x in tokens)
        self.edge_origin = None if edge_origin is None else _frozen(edge_origin)
        self.node_origin = None if node_origin is None else _frozen(node_origin)
        self._build_incidence()

    def _build_incidence(self):
        m = self.m
        ids = np.arange(m, dtype=np.int64)
        node = np.concatenate([self.src, self.dst])
        edge = np.concatenate([ids, ids])
        time = np.concatenate([self.t, self.t])
        other = np.concatenate([self.dst, self.src])
        order = np.lexsort((edge, time, node))
        counts = np.bincount(node, minlength=self.n) if m else np.zeros(self.n, np.int64)
        offsets = np.zeros(self.n + 1, dtype=np.int64)
        np.cumsum(counts, out=offsets[1:])
        self.offsets = _frozen(offsets)
        self.inc_edge = _frozen(edge[order])
        self.inc_time = _frozen(time[order])
        self.inc_other = _frozen(other[order])

    # construction helpers -------------------------------------------------

    @classmethod
    def from_edges(cls, edges: Iterable[Sequence], labeled: bool = False) -> "TemporalGraph":
        """Build from ``(u, v, t)`` or ``(u, v, t, label)`` tuples with arbitrary node tokens."""
        index: dict = {}
        src, dst, ts, labels = [], [], [], []
        for row in edges:
            u, v, t = row[0], row[1], row[2]
            src.append(index.setdefault(str(u), len(index)))
            dst.append(index.setdefault(str(v), len(index)))
            ts.append(int(t))
            if labeled:
                labels.append(int(row[3]))
        return cls(src, dst, ts, labels=labels if labeled else None,
                   tokens=list(index), n=len(index))

    def edge_subgraph(self, edge_ids) -> "TemporalGraph":
        """Edge-induced subgraph; nodes are renumbered in order of first appearance.

        ``edge_origin``/``node_origin`` of the result point at ids of the
        *root* graph, so repeated extraction keeps the original identities.
        """
        edge_ids = np.unique(np.asarray(edge_ids, dtype=np.int64))
        src = self.src[edge_ids]
        dst = self.dst[edge_ids]
        ends = np.empty(2 * len(edge_ids), dtype=np.int64)
        ends[0::2] = src
        ends[1::2] = dst
        _, first = np.unique(ends, return_index=True)
        keep = ends[np.sort(first)]
        remap = np.full(self.n, -1, dtype=np.int64)
        remap[keep] = np.arange(len(keep))
        edge_origin = edge_ids if self.edge_origin is None else self.edge_origin[edge_ids]
        node_origin = keep if self.node_origin is None else self.node_origin[keep]
        return TemporalGraph(
            remap[src],
            remap[dst],
            self.t[edge_ids],
            labels=None if self.labels is None else self.labels[edge_ids],
            tokens=[self.tokens[i] for i in keep],
            n=len(keep),
            edge_origin=edge_origin,
            node_origin=node_origin,
        )

    # accessors ------------------------------------------------------------

    @property
    def labeled(self) -> bool:
        return self.labels is not None

    @property
    def span(self) -> tuple[int, int]:
        if self.m == 0:
            raise ValueError("empty graph has no time span")
        return int(self.t.min()), int(self.t.max())

    def original_edge_ids(self) -> np.ndarray:
        if self.edge_origin is None:
            return np.arange(self.m, dtype=np.int64)
        return self.edge_origin

    def edge(self, i: int) -> TemporalEdge:
        label = None if self.labels is None else int(self.labels[i])
        return TemporalEdge(int(i), int(self.src[i]), int(self.dst[i]), int(self.t[i]), label)

    def edges(self) -> Iterator[TemporalEdge]:
        for i in range(self.m):
            yield self.edge(i)

    def incidence(self, node: int) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        """(edge ids, timestamps, other endpoints) at ``node``, chronological."""
        lo, hi = self.offsets[node], self.offsets[node + 1]
        return self.inc_edge[lo:hi], self.inc_time[lo:hi], self.inc_other[lo:hi]

    def degree(self, node: int) -> int:
        return int(self.offsets[node + 1] - self.offsets[node])

    def __repr__(self):
        return f"TemporalGraph(n={self.n}, m={self.m}, labeled={self.labeled})"


def delta_incident_edges(g: TemporalGraph, endpoint: int, t: int, delta: int) -> list[int]:
    """Edge ids at ``endpoint`` whose timestamp lies in ``[t - delta, t + delta]``."""
    if delta < 0:
        raise ValueError("delta must be non-negative")
    lo, hi = int(g.offsets[endpoint]), int(g.offsets[endpoint + 1])
    times = g.inc_time[lo:hi]
    a = np.searchsorted(times, max(t - delta, _I64_MIN), side="left")
    b = np.searchsorted(times, min(t + delta, _I64_MAX), side="right")
    return g.inc_edge[lo + a:lo + b].tolist()


def node_spreads(g: TemporalGraph) -> np.ndarray:
    """Per node: latest minus earliest incident timestamp (0 for isolated nodes)."""
    out = np.zeros(g.n, dtype=np.int64)
    lo, hi = g.offsets[:-1], g.offsets[1:]
    busy = hi > lo
    out[busy] = g.inc_time[hi[busy] - 1] - g.inc_time[lo[busy]]
    return out


def max_delta(g: TemporalGraph) -> int:
    """Largest timestamp spread at any single node.

    Any ``delta`` at or above this value makes every pair of edges sharing a
    node mutually incident, i.e. the temporal decompositions collapse to their
    static multigraph counterparts.
    """
    if g.m == 0:
        raise ValueError("max_delta is undefined for an empty graph")
    return int(node_spreads(g).max())


# -- edge-list I/O -----------------------------------------------------------


def _open_bytes(source: PathOrStream) -> IO[bytes]:
    if isinstance(source, (str, os.PathLike)):
        raw: IO[bytes] = open(source, "rb")
    else:
        raw = source
    if not hasattr(raw, "peek"):
        raw = io.BufferedReader(raw)  # type: ignore[arg-type]
    if raw.peek(2)[:2] == GZIP_MAGIC:  # type: ignore[attr-defined]
        return gzip.GzipFile(fileobj=raw)  # type: ignore[return-value]
    return raw


def read_edge_list(
    source: PathOrStream,
    interval: Optional[TimeInterval] = None,
    labeled: Optional[bool] = None,
) -> tuple[TemporalGraph, LoadReport]:
    """Parse ``u v t [label]`` lines into a graph and a load report.

    ``labeled=None`` infers the column count from the first data line; after
    that every line must agree.  Node tokens are numbered in order of first
    appearance among *kept* edges.
    """
    report = LoadReport()
    index: dict[str, int] = {}
    src: list[int] = []
    dst: list[int] = []
    ts: list[int] = []
    labels: list[int] = []
    arity = None if labeled is None else (4 if labeled else 3)

    stream = _open_bytes(source)
    try:
        for lineno, raw in enumerate(stream, start=1):
            report.lines += 1
            line = raw.decode("utf-8").strip()
            if not line:
                continue
            if line[0] in "#%":
                report.comments += 1
                continue
            parts = line.split()
            if arity is None:
                if len(parts) not in (3, 4):
                    raise GraphFormatError(f"expected 3 or 4 columns, got {len(parts)}", lineno)
                arity = len(parts)
            if len(parts) != arity:
                if len(parts) in (3, 4):
                    raise GraphFormatError("mixed labeled and unlabeled lines", lineno)
                raise GraphFormatError(f"expected {arity} columns, got {len(parts)}", lineno)
            try:
                t = int(parts[2])
                label = int(parts[3]) if arity == 4 else 0
            except ValueError:
                raise GraphFormatError(f"non-integer timestamp or label in {line!r}", lineno) from None
            u, v = parts[0], parts[1]
            if u == v:
                report.rejected_self_loops += 1
                continue
            if interval is not None and t not in interval:
                report.dropped_interval += 1
                continue
            src.append(index.setdefault(u, len(index)))
            dst.append(index.setdefault(v, len(index)))
            ts.append(t)
            if arity == 4:
                labels.append(label)
    finally:
        if stream is not source:
            stream.close()

    report.edges = len(ts)
    if report.rejected_self_loops:
        log.warning("rejected %d self-loop lines", report.rejected_self_loops)
    g = TemporalGraph(
        np.array(src, dtype=np.int64),
        np.array(dst, dtype=np.int64),
        np.array(ts, dtype=np.int64),
        labels=np.array(labels, dtype=np.int64) if arity == 4 else None,
        tokens=list(index),
        n=len(index),
    )
    return g, report


def load_graph(
    source: PathOrStream,
    interval: Optional[TimeInterval] = None,
    labeled: Optional[bool] = None,
) -> TemporalGraph:
    g, report = read_edge_list(source, interval=interval, labeled=labeled)
    log.info(report.summary())
    return g


def write_edge_list(g: TemporalGraph, stream: IO[str]) -> None:
    """Inverse of :func:`read_edge_list` (space separated, one edge per line)."""
    tok = g.tokens
    for i in range(g.m):
        row = f"{tok[g.src[i]]} {tok[g.dst[i]]} {g.t[i]}"
        if g.labels is not None:
            row += f" {g.labels[i]}"
        stream.write(row + "\n")
