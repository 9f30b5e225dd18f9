"""Delta selection from inter-event times, per-delta statistics and label analytics."""
from __future__ import annotations

import csv
import io
import math
from collections import Counter
from dataclasses import dataclass, field, asdict
from fractions import Fraction
from typing import Iterable, Optional, Sequence

import numpy as np
import scipy.sparse as sp

from . import _kernels
from .components import EdgePartition, delta_connected_components
from .decomposition import CORE, _clamp, all_weights, decompose, extract_subgraph
from .graph import TemporalGraph

DEFAULT_PERCENTILES = (0.10, 0.25, 0.50, 0.75)

CLAIM, FACT = 1, 0
CLAIMS_ONLY, FACTS_ONLY, MIXED = "claims-only", "facts-only", "mixed"


@dataclass
class IetSummary:
    iets: np.ndarray                      # sorted multiset
    percentiles: dict = field(default_factory=dict)  # fraction -> delta

    def delta_for(self, fraction: float) -> int:
        return nearest_rank(self.iets, fraction)


def inter_event_times(g: TemporalGraph) -> np.ndarray:
    """Gaps between chronologically consecutive edges at each node, as a sorted multiset."""
    if g.m == 0:
        return np.zeros(0, np.int64)
    inc_node = np.repeat(np.arange(g.n, dtype=np.int64), np.diff(g.offsets))
    same = inc_node[1:] == inc_node[:-1]
    return np.sort((g.inc_time[1:] - g.inc_time[:-1])[same])


def _exact(fraction) -> Fraction:
    # decimal-exact so that e.g. 0.55 * 20 lands on rank 11, not 12
    return Fraction(str(fraction)) if isinstance(fraction, float) else Fraction(fraction)


def nearest_rank(sorted_values: np.ndarray, fraction) -> int:
    """The ceil(p * N)-th smallest value (1-based, at least the first)."""
    p = _exact(fraction)
    if not 0 <= p <= 1:
        raise ValueError(f"percentile fraction {fraction} outside [0, 1]")
    if len(sorted_values) == 0:
        raise ValueError("no values to take a percentile of")
    rank = max(1, math.ceil(p * len(sorted_values)))
    return int(sorted_values[rank - 1])


def iet_percentiles(g: TemporalGraph, percentiles: Sequence[float] = DEFAULT_PERCENTILES) -> IetSummary:
    iets = inter_event_times(g)
    if len(iets) == 0:
        raise ValueError("graph has no node with two or more incident edges; no inter-event times")
    return IetSummary(iets, {p: nearest_rank(iets, p) for p in percentiles})


@dataclass
class DeltaStats:
    delta: int
    avg_degree: float
    max_degree: int
    avg_support: float
    max_support: int
    xi: int   # most edges within delta of a single edge (either endpoint, itself included)


def delta_stats(g: TemporalGraph, delta: int) -> DeltaStats:
    if delta < 0:
        raise ValueError("delta must be non-negative")
    if g.m == 0:
        return DeltaStats(int(delta), 0.0, 0, 0.0, 0, 0)
    deg = all_weights(g, delta, "core")
    sup = all_weights(g, delta, "truss")
    xi = _kernels.union_window_sizes(g.src, g.dst, g.t, g.offsets, g.inc_edge, g.inc_time, _clamp(g, delta))
    return DeltaStats(
        int(delta),
        float(deg.sum()) / g.m,
        int(deg.max()),
        float(sup.sum()) / g.m,
        int(sup.max()),
        int(xi.max()),
    )


def clustering_coefficient(g: TemporalGraph) -> float:
    """Closed over connected triples on the collapsed simple graph (0 without triples)."""
    if g.m == 0:
        return 0.0
    a = np.minimum(g.src, g.dst)
    b = np.maximum(g.src, g.dst)
    pairs = np.unique(np.stack([a, b], axis=1), axis=0)
    rows = np.concatenate([pairs[:, 0], pairs[:, 1]])
    cols = np.concatenate([pairs[:, 1], pairs[:, 0]])
    adj = sp.csr_matrix((np.ones(len(rows), np.int64), (rows, cols)), shape=(g.n, g.n))
    closed = adj.multiply(adj @ adj).sum()          # 6 x triangles
    deg = np.asarray(adj.sum(axis=1)).ravel()
    triples = int((deg * (deg - 1)).sum())          # 2 x connected triples
    return float(closed) / triples if triples else 0.0


# -- label analytics -------------------------------------------------------------


@dataclass
class ComponentLabels:
    component: int
    nodes: int
    edges: int
    census: dict
    homophily: str
    frequency: float


@dataclass
class ComponentLabelReport:
    rows: list

    def class_counts(self) -> Counter:
        return Counter(r.homophily for r in self.rows)

    def mean_frequency(self, homophily: str) -> float:
        vals = [r.frequency for r in self.rows if r.homophily == homophily]
        return float(np.mean(vals)) if vals else 0.0

    def total_edges(self) -> int:
        return sum(sum(r.census.values()) for r in self.rows)


def homophily_class(census: dict, claim_label: int = CLAIM, fact_label: int = FACT) -> str:
    present = {lab for lab, c in census.items() if c}
    if present == {claim_label}:
        return CLAIMS_ONLY
    if present == {fact_label}:
        return FACTS_ONLY
    if len(present) == 1:
        return f"only-{present.pop()}"
    return MIXED


def retweet_frequency(n_edges: int, t_min: int, t_max: int) -> float:
    """(edges - 1) / duration in events per time unit; 0 for one edge or zero duration."""
    if n_edges <= 1 or t_max == t_min:
        return 0.0
    return (n_edges - 1) / (t_max - t_min)


def component_label_report(g: TemporalGraph, partition: EdgePartition,
                           claim_label: int = CLAIM, fact_label: int = FACT) -> ComponentLabelReport:
    if g.labels is None:
        raise ValueError("label report needs a labeled graph")
    if len(partition.component_of) != g.m:
        raise ValueError("partition does not cover this graph")
    rows = []
    for cid, comp in enumerate(partition.components):
        labels = g.labels[comp]
        census = {int(k): int(v) for k, v in zip(*np.unique(labels, return_counts=True))}
        nodes = len(np.union1d(g.src[comp], g.dst[comp]))
        ts = g.t[comp]
        rows.append(ComponentLabels(
            cid, nodes, len(comp), census,
            homophily_class(census, claim_label, fact_label),
            retweet_frequency(len(comp), int(ts.min()), int(ts.max())),
        ))
    return ComponentLabelReport(rows)


def label_sweep(g: TemporalGraph, delta: int, kind: str = CORE, ks: Optional[Iterable[int]] = None,
                claim_label: int = CLAIM, fact_label: int = FACT) -> list[dict]:
    """Per k: size of the (k, delta)-core/truss and the homophily census of its components."""
    result = decompose(g, delta, kind)
    if ks is None:
        ks = range(1, result.max_value + 1)
    out = []
    for k in ks:
        sub = extract_subgraph(g, result, k)
        row = {"k": k, "nodes": sub.n, "edges": sub.m, "components": 0,
               CLAIMS_ONLY: 0, FACTS_ONLY: 0, MIXED: 0,
               "freq_" + CLAIMS_ONLY: 0.0, "freq_" + FACTS_ONLY: 0.0}
        if sub.m:
            rep = component_label_report(sub, delta_connected_components(sub, delta), claim_label, fact_label)
            counts = rep.class_counts()
            row["components"] = len(rep.rows)
            for cls in (CLAIMS_ONLY, FACTS_ONLY, MIXED):
                row[cls] = counts.get(cls, 0)
            row["freq_" + CLAIMS_ONLY] = rep.mean_frequency(CLAIMS_ONLY)
            row["freq_" + FACTS_ONLY] = rep.mean_frequency(FACTS_ONLY)
        out.append(row)
    return out


# -- text output --------------------------------------------------------------------


def format_table(header: Sequence[str], rows: Iterable[Sequence], delimiter: str = "\t") -> str:
    buf = io.StringIO()
    w = csv.writer(buf, delimiter=delimiter, lineterminator="\n")
    w.writerow(header)
    for r in rows:
        w.writerow(r)
    return buf.getvalue()


def format_block(name: str, values: dict) -> str:
    """``[name]`` followed by ``key=value`` lines."""
    lines = [f"[{name}]"] + [f"{k}={v}" for k, v in values.items()]
    return "\n".join(lines) + "\n"


def percentile_name(fraction) -> str:
    p = _exact(fraction) * 100
    return f"p{p.numerator}" if p.denominator == 1 else f"p{float(p):g}"


def stats_as_dict(s: DeltaStats) -> dict:
    return asdict(s)
