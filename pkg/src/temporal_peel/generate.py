"""Synthetic temporal graphs for tests and benchmarks."""
from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np

from .graph import TemporalGraph
from .stats import CLAIM, CLAIMS_ONLY, FACT, FACTS_ONLY, MIXED


def random_temporal_graph(n: int, m: int, span: int, seed: Optional[int] = None,
                          label_fraction: Optional[float] = None) -> TemporalGraph:
    """Uniform random endpoints (no self-loops) and timestamps in ``[0, span)``.

    With ``label_fraction`` each edge is labeled 1 with that probability, else 0.
    """
    if n < 2:
        raise ValueError("need at least two nodes")
    rng = np.random.default_rng(seed)
    src = rng.integers(0, n, m)
    dst = rng.integers(0, n - 1, m)
    dst = np.where(dst >= src, dst + 1, dst)
    t = rng.integers(0, max(1, span), m)
    labels = None
    if label_fraction is not None:
        labels = (rng.random(m) < label_fraction).astype(np.int64)
    return TemporalGraph(src, dst, t, labels=labels, n=n)


@dataclass
class PlantedComponent:
    edges: np.ndarray
    homophily: str


def planted_label_graph(seed: Optional[int] = None, n_components: int = 12, min_edges: int = 5,
                        max_edges: int = 40, nodes_per_component: int = 6,
                        ) -> tuple[TemporalGraph, list[PlantedComponent]]:
    """Node-disjoint groups, each a chain of edges one time unit apart.

    Every edge shares a node with its predecessor, so each group is connected
    for any delta >= 1, and timestamps never repeat at a node, so all
    inter-event times are >= 1.  Groups cycle through claims-only, facts-only
    and mixed labelings.
    """
    rng = np.random.default_rng(seed)
    kinds = (CLAIMS_ONLY, FACTS_ONLY, MIXED)
    src, dst, ts, labels = [], [], [], []
    planted = []
    clock = 0
    for c in range(n_components):
        base = c * nodes_per_component
        size = int(rng.integers(min_edges, max_edges + 1))
        kind = kinds[c % 3]
        ids = []
        x, y = base, base + 1
        for i in range(size):
            if i:
                keep = x if rng.random() < 0.5 else y
                other = int(rng.integers(0, nodes_per_component - 1)) + base
                if other >= keep:
                    other += 1
                x, y = keep, other
            ids.append(len(ts))
            src.append(x)
            dst.append(y)
            ts.append(clock)
            clock += 1
            if kind == CLAIMS_ONLY:
                labels.append(CLAIM)
            elif kind == FACTS_ONLY:
                labels.append(FACT)
            else:
                labels.append(CLAIM if i % 2 == 0 else FACT)
        clock += 1000
        planted.append(PlantedComponent(np.array(ids, dtype=np.int64), kind))
    g = TemporalGraph(src, dst, ts, labels=labels, n=n_components * nodes_per_component)
    return g, planted
