"""JIT-compiled inner loops.

All kernels take the flat arrays of a :class:`~temporal_peel.graph.TemporalGraph`
(``src``, ``dst``, ``t`` plus the CSR incidence table) and a non-negative
``delta`` that callers have already clamped to the graph's time span, so
``t +/- delta`` cannot overflow.

``group`` arrays restrict counting to edges carrying the same group id as the
edge being evaluated; pass all zeros for the whole graph.
"""
import numpy as np
from numba import njit


@njit(cache=True)
def _lower(a, lo, hi, x):
    # first index in [lo, hi) with a[i] >= x
    while lo < hi:
        mid = (lo + hi) >> 1
        if a[mid] < x:
            lo = mid + 1
        else:
            hi = mid
    return lo


@njit(cache=True)
def _upper(a, lo, hi, x):
    # first index in [lo, hi) with a[i] > x
    while lo < hi:
        mid = (lo + hi) >> 1
        if a[mid] <= x:
            lo = mid + 1
        else:
            hi = mid
    return lo


@njit(cache=True)
def window_counts(src, dst, t, offsets, inc_edge, inc_time, delta, group):
    """Per edge, the number of same-group edges within ``delta`` at each endpoint."""
    m = src.shape[0]
    a_src = np.zeros(m, np.int64)
    a_dst = np.zeros(m, np.int64)
    for e in range(m):
        ge = group[e]
        for side in range(2):
            x = src[e] if side == 0 else dst[e]
            lo = _lower(inc_time, offsets[x], offsets[x + 1], t[e] - delta)
            hi = _upper(inc_time, lo, offsets[x + 1], t[e] + delta)
            c = 0
            for j in range(lo, hi):
                if group[inc_edge[j]] == ge:
                    c += 1
            if side == 0:
                a_src[e] = c
            else:
                a_dst[e] = c
    return a_src, a_dst


@njit(cache=True)
def union_window_sizes(src, dst, t, offsets, inc_edge, inc_time, delta):
    """Per edge, the number of distinct edges within ``delta`` at either endpoint."""
    m = src.shape[0]
    out = np.zeros(m, np.int64)
    for e in range(m):
        u = src[e]
        v = dst[e]
        lo = _lower(inc_time, offsets[u], offsets[u + 1], t[e] - delta)
        hi = _upper(inc_time, lo, offsets[u + 1], t[e] + delta)
        c = hi - lo
        lo = _lower(inc_time, offsets[v], offsets[v + 1], t[e] - delta)
        hi = _upper(inc_time, lo, offsets[v + 1], t[e] + delta)
        for j in range(lo, hi):
            f = inc_edge[j]
            # parallel edges were already counted at u
            if not ((src[f] == u and dst[f] == v) or (src[f] == v and dst[f] == u)):
                c += 1
        out[e] = c
    return out


@njit(cache=True)
def _bin_sort(values):
    """Bucket layout: ``order`` sorted by value (ties by id), ``pos`` its inverse,
    ``start[k]`` the first slot of bucket ``k``."""
    m = values.shape[0]
    top = 0
    for e in range(m):
        if values[e] > top:
            top = values[e]
    start = np.zeros(top + 2, np.int64)
    for e in range(m):
        start[values[e] + 1] += 1
    for k in range(1, top + 2):
        start[k] += start[k - 1]
    fill = start.copy()
    order = np.empty(m, np.int64)
    pos = np.empty(m, np.int64)
    for e in range(m):
        p = fill[values[e]]
        order[p] = e
        pos[e] = p
        fill[values[e]] += 1
    return order, pos, start


@njit(cache=True)
def _demote(f, values, order, pos, start):
    # move f from bucket values[f] to values[f] - 1 in O(1)
    k = values[f]
    pf = pos[f]
    pw = start[k]
    w = order[pw]
    if w != f:
        order[pf] = w
        pos[w] = pf
        order[pw] = f
        pos[f] = pw
    start[k] += 1
    values[f] = k - 1


@njit(cache=True)
def core_peel(src, dst, t, offsets, inc_edge, inc_time, delta):
    """Core numbers by edge peeling on per-endpoint incident counts."""
    m = src.shape[0]
    a_src, a_dst = window_counts(src, dst, t, offsets, inc_edge, inc_time, delta,
                                 np.zeros(m, np.int64))
    d = np.minimum(a_src, a_dst)
    order, pos, start = _bin_sort(d)
    removed = np.zeros(m, np.bool_)
    for i in range(m):
        e = order[i]
        de = d[e]
        removed[e] = True
        for side in range(2):
            x = src[e] if side == 0 else dst[e]
            lo = _lower(inc_time, offsets[x], offsets[x + 1], t[e] - delta)
            hi = _upper(inc_time, lo, offsets[x + 1], t[e] + delta)
            for j in range(lo, hi):
                f = inc_edge[j]
                if removed[f] or d[f] <= de:
                    continue
                if src[f] == x:
                    a_src[f] -= 1
                else:
                    a_dst[f] -= 1
                if min(a_src[f], a_dst[f]) < d[f]:
                    _demote(f, d, order, pos, start)
    return d, order


@njit(cache=True)
def _link_partners(e, u, v, t, offsets, inc_edge, inc_time, inc_other, delta,
                   removed, group, head, nxt):
    """Chain the live same-group edges in v's window by their far endpoint.

    Returns the window bounds; ``head[w]`` starts a linked list of incidence
    slots (through ``nxt[slot - lo]``) of edges ``({v, w}, t2)``.
    """
    lo = _lower(inc_time, offsets[v], offsets[v + 1], t[e] - delta)
    hi = _upper(inc_time, lo, offsets[v + 1], t[e] + delta)
    ge = group[e]
    for j in range(lo, hi):
        w = inc_other[j]
        f = inc_edge[j]
        if w == u or removed[f] or group[f] != ge:
            continue
        nxt[j - lo] = head[w]
        head[w] = j
    return lo, hi


@njit(cache=True)
def _unlink(lo, hi, inc_other, head):
    for j in range(lo, hi):
        head[inc_other[j]] = -1


@njit(cache=True)
def triangle_support(src, dst, t, offsets, inc_edge, inc_time, inc_other, delta,
                     removed, group):
    """Per live edge, the number of temporally local triangle partner pairs."""
    m = src.shape[0]
    n = offsets.shape[0] - 1
    head = np.full(n, -1, np.int64)
    nxt = np.empty(max(1, _max_degree(offsets)), np.int64)
    s = np.zeros(m, np.int64)
    for e in range(m):
        if removed[e]:
            continue
        u = src[e]
        v = dst[e]
        ge = group[e]
        vlo, vhi = _link_partners(e, u, v, t, offsets, inc_edge, inc_time, inc_other,
                                  delta, removed, group, head, nxt)
        lo = _lower(inc_time, offsets[u], offsets[u + 1], t[e] - delta)
        hi = _upper(inc_time, lo, offsets[u + 1], t[e] + delta)
        c = 0
        for i in range(lo, hi):
            w = inc_other[i]
            f1 = inc_edge[i]
            if w == v or removed[f1] or group[f1] != ge:
                continue
            t1 = inc_time[i]
            k = head[w]
            while k != -1:
                if abs(t1 - inc_time[k]) <= delta:
                    c += 1
                k = nxt[k - vlo]
        s[e] = c
        _unlink(vlo, vhi, inc_other, head)
    return s


@njit(cache=True)
def _max_degree(offsets):
    best = 0
    for x in range(offsets.shape[0] - 1):
        d = offsets[x + 1] - offsets[x]
        if d > best:
            best = d
    return best


@njit(cache=True)
def truss_peel(src, dst, t, offsets, inc_edge, inc_time, inc_other, delta):
    """Truss numbers by peeling on temporally local triangle support."""
    m = src.shape[0]
    n = offsets.shape[0] - 1
    removed = np.zeros(m, np.bool_)
    group = np.zeros(m, np.int64)
    tau = triangle_support(src, dst, t, offsets, inc_edge, inc_time, inc_other, delta,
                           removed, group)
    order, pos, start = _bin_sort(tau)
    head = np.full(n, -1, np.int64)
    nxt = np.empty(max(1, _max_degree(offsets)), np.int64)
    for i in range(m):
        e = order[i]
        te = tau[e]
        removed[e] = True
        u = src[e]
        v = dst[e]
        vlo, vhi = _link_partners(e, u, v, t, offsets, inc_edge, inc_time, inc_other,
                                  delta, removed, group, head, nxt)
        lo = _lower(inc_time, offsets[u], offsets[u + 1], t[e] - delta)
        hi = _upper(inc_time, lo, offsets[u + 1], t[e] + delta)
        for a in range(lo, hi):
            w = inc_other[a]
            f1 = inc_edge[a]
            if w == v or removed[f1]:
                continue
            t1 = inc_time[a]
            k = head[w]
            while k != -1:
                if abs(t1 - inc_time[k]) <= delta:
                    f2 = inc_edge[k]
                    if tau[f1] > te:
                        _demote(f1, tau, order, pos, start)
                    if tau[f2] > te:
                        _demote(f2, tau, order, pos, start)
                k = nxt[k - vlo]
        _unlink(vlo, vhi, inc_other, head)
    return tau, order


@njit(cache=True)
def _find(parent, x):
    while parent[x] != x:
        parent[x] = parent[parent[x]]
        x = parent[x]
    return x


@njit(cache=True)
def union_find_roots(n_items, pairs_a, pairs_b):
    """Root of every item after uniting each ``(pairs_a[i], pairs_b[i])``.

    Path halving plus union by size.
    """
    parent = np.arange(n_items)
    size = np.ones(n_items, np.int64)
    for i in range(pairs_a.shape[0]):
        ra = _find(parent, pairs_a[i])
        rb = _find(parent, pairs_b[i])
        if ra == rb:
            continue
        if size[ra] < size[rb]:
            ra, rb = rb, ra
        parent[rb] = ra
        size[ra] += size[rb]
    for x in range(n_items):
        parent[x] = _find(parent, x)
    return parent
