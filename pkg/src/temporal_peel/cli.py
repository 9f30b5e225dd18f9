"""Command-line entry point: ``temporal-peel <command> ...``.

Exit status is 0 on success, 1 on a domain error (bad input, oracle guard,
failed verification) and 2 on a usage error.
"""
from __future__ import annotations

import argparse
import contextlib
import logging
import os
import re
import shutil
import sys
import tempfile
from typing import Optional

import numpy as np

from . import oracle
from .components import component_core_check, delta_connected_components, write_partition
from .decomposition import CORE, KINDS, TRUSS, decompose, extract_subgraph, write_result
from .generate import random_temporal_graph
from .graph import GraphFormatError, TemporalGraph, TimeInterval, read_edge_list, write_edge_list
from .stats import (
    DEFAULT_PERCENTILES,
    clustering_coefficient,
    component_label_report,
    delta_stats,
    format_block,
    format_table,
    iet_percentiles,
    label_sweep,
    percentile_name,
    stats_as_dict,
)

log = logging.getLogger("temporal_peel")

TMPDIR_ENV = "TEMPORAL_PEEL_TMPDIR"
_PCT = re.compile(r"^p(\d+(?:\.\d+)?)$")


class UsageError(Exception):
    pass


@contextlib.contextmanager
def open_output(path: Optional[str]):
    """Text output to stdout for ``-``/None, else written to a temp file and moved into place."""
    if path in (None, "-"):
        yield sys.stdout
        return
    tmpdir = os.environ.get(TMPDIR_ENV) or os.path.dirname(os.path.abspath(path))
    fd, tmp = tempfile.mkstemp(dir=tmpdir, prefix=".tp-", suffix=".part")
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="\n") as fh:
            yield fh
        shutil.move(tmp, path)
    except BaseException:
        with contextlib.suppress(FileNotFoundError):
            os.unlink(tmp)
        raise


def resolve_delta(g: TemporalGraph, args) -> tuple[int, str]:
    """Concrete delta plus a note on where it came from (echoed into headers)."""
    raw = getattr(args, "delta", None)
    frac = getattr(args, "percentile", None)
    if raw is None and frac is None:
        raise UsageError("one of --delta or --percentile is required")
    if raw is not None:
        if re.fullmatch(r"\d+", raw):
            return int(raw), "explicit"
        match = _PCT.match(raw)
        if not match:
            raise UsageError(f"--delta expects an integer or pNN, got {raw!r}")
        frac = float(match.group(1)) / 100
    if not 0 <= frac <= 1:
        raise UsageError("percentile must be within [0, 1]")
    delta = iet_percentiles(g, [frac]).percentiles[frac]
    return delta, percentile_name(frac)


def _load(args) -> TemporalGraph:
    interval = TimeInterval.parse(args.interval) if args.interval else None
    labeled = True if getattr(args, "labeled", False) else None
    g, report = read_edge_list(args.input, interval=interval, labeled=labeled)
    log.info("%s: %s", args.input, report.summary())
    return g


def _header(args, delta: int, source: str, **extra) -> dict:
    head = {"delta_source": source, "input": os.path.basename(args.input)}
    if args.interval:
        head["interval"] = args.interval
    head.update(extra)
    return head


# -- commands ---------------------------------------------------------------------


def cmd_decompose(args) -> int:
    g = _load(args)
    delta, source = resolve_delta(g, args)
    result = decompose(g, delta, args.command)
    with open_output(args.output) as out:
        write_result(g, result, out, _header(args, delta, source))
    return 0


def cmd_shells(args) -> int:
    if args.k < 0:
        raise UsageError("--k must be non-negative")
    g = _load(args)
    delta, source = resolve_delta(g, args)
    result = decompose(g, delta, args.kind)
    mode = "exactly" if args.exact else "at_least"
    sub = extract_subgraph(g, result, args.k, mode)
    sub_result = type(result)(result.kind, result.delta, result.values[sub.edge_origin])
    with open_output(args.output) as out:
        write_result(sub, sub_result, out, _header(args, delta, source, k=args.k, mode=mode))
    return 0


def cmd_components(args) -> int:
    g = _load(args)
    delta, source = resolve_delta(g, args)
    target = g
    extra = {}
    for kind, k in ((CORE, args.within_core), (TRUSS, args.within_truss)):
        if k is not None:
            target = extract_subgraph(g, decompose(g, delta, kind), k)
            extra = {"within": f"{kind}>={k}"}
    partition = delta_connected_components(target, delta)
    with open_output(args.output) as out:
        write_partition(target, partition, out, _header(args, delta, source, **extra))
    if args.label_report:
        report = component_label_report(target, partition)
        rows = [(r.component, r.nodes, r.edges,
                 ";".join(f"{k}:{v}" for k, v in sorted(r.census.items())),
                 r.homophily, repr(r.frequency)) for r in report.rows]
        with open_output(args.label_report) as out:
            out.write(format_table(("component", "nodes", "edges", "census", "class", "frequency"),
                                   rows, args.delimiter))
    return 0


def cmd_stats(args) -> int:
    g = _load(args)
    d = args.delimiter
    chunks = []
    summary = iet_percentiles(g, DEFAULT_PERCENTILES)
    deltas: list[tuple[str, int]] = []
    if args.delta is not None or args.percentile is not None:
        delta, source = resolve_delta(g, args)
        deltas.append((source, delta))
    else:
        deltas = [(percentile_name(p), v) for p, v in summary.percentiles.items()]

    block = {"nodes": g.n, "edges": g.m, "iet_count": len(summary.iets)}
    if g.m:
        block["span"] = "%d:%d" % g.span
    chunks.append(format_block("graph", block))
    if args.percentiles:
        chunks.append(format_block("iet_percentiles",
                                   {percentile_name(p): v for p, v in summary.percentiles.items()}))
    rows = []
    for source, delta in deltas:
        s = stats_as_dict(delta_stats(g, delta))
        rows.append([source] + [repr(v) if isinstance(v, float) else v for v in s.values()])
    chunks.append(format_table(["source", "delta", "avg_degree", "max_degree", "avg_support",
                                "max_support", "xi"], rows, d))
    if args.clustering:
        rows = []
        for source, delta in deltas:
            for kind in KINDS:
                res = decompose(g, delta, kind)
                for k in range(res.max_value, -1 if kind == TRUSS else 0, -1):
                    sub = extract_subgraph(g, res, k)
                    rows.append([source, delta, kind, k, sub.n, sub.m, repr(clustering_coefficient(sub))])
        chunks.append(format_table(["source", "delta", "kind", "k", "nodes", "edges", "clustering"], rows, d))
    if args.label_sweep:
        rows = []
        for source, delta in deltas:
            for kind in KINDS:
                for r in label_sweep(g, delta, kind):
                    rows.append([source, delta, kind] + [repr(v) if isinstance(v, float) else v for v in r.values()])
        head = ["source", "delta", "kind", "k", "nodes", "edges", "components", "claims-only",
                "facts-only", "mixed", "freq_claims-only", "freq_facts-only"]
        chunks.append(format_table(head, rows, d))
    with open_output(args.output) as out:
        out.write("\n".join(chunks))
    return 0


def cmd_verify(args) -> int:
    g = _load(args)
    delta, source = resolve_delta(g, args)
    if args.kind == "components":
        ok = delta_connected_components(g, delta).as_sets() == oracle.oracle_components(g, delta).as_sets()
    else:
        fast = decompose(g, delta, args.kind)
        ok = np.array_equal(fast.values, oracle.oracle_decompose(g, delta, args.kind).values)
        if ok:
            for k in range(1, fast.max_value + 1):
                sub = extract_subgraph(g, fast, k)
                sub_res = type(fast)(fast.kind, delta, fast.values[sub.edge_origin])
                ok &= component_core_check(sub, delta_connected_components(sub, delta), sub_res, k)
    verdict = "PASS" if ok else "FAIL"
    print(f"{verdict}\tkind={args.kind}\tdelta={delta}\tdelta_source={source}\tedges={g.m}")
    return 0 if ok else 1


def cmd_generate(args) -> int:
    n = args.nodes if args.nodes is not None else max(2, args.edges // 10)
    g = random_temporal_graph(n, args.edges, args.span, seed=args.seed, label_fraction=args.label_fraction)
    with open_output(args.output) as out:
        write_edge_list(g, out)
    return 0


# -- parser ------------------------------------------------------------------------


def _add_input(p, delta=True):
    p.add_argument("input", help="edge list 'u v t [label]', optionally gzip-compressed")
    p.add_argument("--interval", metavar="A:B", help="keep only edges with A <= t <= B")
    p.add_argument("--labeled", action="store_true", help="require a label column")
    p.add_argument("-o", "--output", default="-", help="output path (default: stdout)")
    p.add_argument("--csv", dest="delimiter", action="store_const", const=",", default="\t",
                   help="comma instead of tab for tables")
    if delta:
        g = p.add_mutually_exclusive_group()
        g.add_argument("--delta", help="integer delta, or a percentile of the inter-event times (p10, p25, p50, p75, ...)")
        g.add_argument("--percentile", type=float, metavar="FRACTION",
                       help="delta as this inter-event-time percentile, e.g. 0.9")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="temporal-peel", description=__doc__.splitlines()[0])
    parser.add_argument("-q", "--quiet", action="store_true", help="suppress the load report")
    sub = parser.add_subparsers(dest="command", required=True)

    for kind in KINDS:
        p = sub.add_parser(kind, help=f"(k, delta)-{kind} number of every edge")
        _add_input(p)
        p.set_defaults(func=cmd_decompose)

    p = sub.add_parser("shells", help="edges of a (k, delta)-core/truss or shell")
    _add_input(p)
    p.add_argument("--kind", choices=KINDS, default=CORE)
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--exact", action="store_true", help="shell (value == k) instead of core (value >= k)")
    p.set_defaults(func=cmd_shells)

    p = sub.add_parser("components", help="delta-connected components")
    _add_input(p)
    within = p.add_mutually_exclusive_group()
    within.add_argument("--within-core", type=int, metavar="K")
    within.add_argument("--within-truss", type=int, metavar="K")
    p.add_argument("--label-report", metavar="PATH", help="write the per-component label census here")
    p.set_defaults(func=cmd_components)

    p = sub.add_parser("stats", help="inter-event times and per-delta statistics")
    _add_input(p)
    p.add_argument("--percentiles", action="store_true", help="emit the inter-event-time percentiles")
    p.add_argument("--clustering", action="store_true", help="clustering coefficient per core/truss")
    p.add_argument("--label-sweep", action="store_true", help="homophily census per k (labeled input)")
    p.set_defaults(func=cmd_stats)

    p = sub.add_parser("verify", help="check the fast path against the brute-force oracle")
    _add_input(p)
    p.add_argument("--kind", choices=KINDS + ("components",), default=CORE)
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("generate", help="write a synthetic random temporal graph")
    p.add_argument("--edges", type=int, required=True)
    p.add_argument("--nodes", type=int)
    p.add_argument("--span", type=int, default=1_000_000)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--label-fraction", type=float)
    p.add_argument("-o", "--output", default="-")
    p.set_defaults(func=cmd_generate)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.WARNING if args.quiet else logging.INFO,
                        format="%(levelname)s: %(message)s", stream=sys.stderr)
    try:
        return args.func(args)
    except UsageError as exc:
        parser.error(str(exc))
    except (GraphFormatError, oracle.OracleGuardError, ValueError, OSError) as exc:
        log.error("%s", exc)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
