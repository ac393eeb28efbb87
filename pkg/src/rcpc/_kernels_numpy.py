"""Pure-numpy kernels, vectorized over subsets, pair chunks and nodes.

Same signatures, same enumeration order and same results as the numba
kernels; slower, and memory-hungry above n = 14.
"""
from __future__ import annotations

import numpy as np

_CHUNK = 1 << 18


def _subsets(n):
    return np.arange(1 << n, dtype=np.int64)


def _color_adjacency(adj, colors, n, ncol):
    adjc = np.zeros((n, ncol), dtype=np.int64)
    for v in range(n):
        for u in range(n):
            if (int(adj[v]) >> u) & 1:
                adjc[v, colors[u]] |= np.int64(1) << u
    return adjc


def _members(S, n):
    return ((S[:, None] >> np.arange(n, dtype=np.int64)) & 1).astype(bool)


def rs_subset_tables(adj, colors, n, ncol, r):
    adjc = _color_adjacency(adj, colors, n, ncol)
    S = _subsets(n)
    notS = ~S
    mem = _members(S, n)
    valid = np.zeros((S.size, n), dtype=bool)
    for v in range(n):
        per_color = np.bitwise_count(adjc[v][None, :] & notS[:, None])
        valid[:, v] = ((per_color >= r).any(axis=1)
                       | ((per_color > 0).sum(axis=1) >= 2))
    valid &= mem
    cnt = valid.sum(axis=1).astype(np.int64)
    full = cnt == mem.sum(axis=1)
    full[0] = False
    cbits = np.left_shift(np.int64(1), np.asarray(colors, dtype=np.int64))
    cmask = np.bitwise_or.reduce(np.where(valid, cbits[None, :], 0), axis=1)
    cmask[0] = 0
    return full, cnt, cmask.astype(np.int64)


def qualify_table(adj, colors, n, ncol, r):
    adjc = _color_adjacency(adj, colors, n, ncol)
    S = _subsets(n)
    notS = ~S
    mem = _members(S, n)
    qual = np.zeros(S.size, dtype=bool)
    for v in range(n):
        outdeg = np.bitwise_count(np.asarray(adj[v], dtype=np.int64) & notS)
        distinct = (np.bitwise_count(adjc[v][None, :] & notS[:, None]) > 0).sum(axis=1)
        qual |= mem[:, v] & ((outdeg >= r) | (distinct >= 3))
    qual[0] = False
    return qual


def _pair_chunks(n):
    """Yield (m1, m2) arrays of canonical pairs in ternary-counter order."""
    total = 3 ** n
    pw = 3 ** np.arange(n, dtype=np.int64)
    for start in range(1, total, _CHUNK):
        codes = np.arange(start, min(start + _CHUNK, total), dtype=np.int64)
        digits = (codes[:, None] // pw[None, :]) % 3
        bits = np.left_shift(np.int64(1), np.arange(n, dtype=np.int64))
        m1 = ((digits == 1) * bits).sum(axis=1)
        m2 = ((digits == 2) * bits).sum(axis=1)
        u = m1 | m2
        keep = (m1 != 0) & (m2 != 0) & ((u & -u & m1) != 0)
        yield m1[keep], m2[keep]


def _first(m1, m2, bad):
    hit = np.flatnonzero(bad)
    if hit.size:
        k = hit[0]
        return np.int64(m1[k]), np.int64(m2[k])
    return None


def scan_rs(n, full, cnt, cmask, s):
    for m1, m2 in _pair_chunks(n):
        bad = (~full[m1] & ~full[m2]
               & (np.bitwise_count(cmask[m1] | cmask[m2]) < 2)
               & (cnt[m1] + cnt[m2] < s))
        found = _first(m1, m2, bad)
        if found is not None:
            return found
    return np.int64(-1), np.int64(-1)


def scan_rs_fewest(n, full, cnt, cmask, s):
    best, found = s, (np.int64(-1), np.int64(-1))
    for m1, m2 in _pair_chunks(n):
        k = cnt[m1] + cnt[m2]
        bad = (~full[m1] & ~full[m2]
               & (np.bitwise_count(cmask[m1] | cmask[m2]) < 2) & (k < best))
        hit = np.flatnonzero(bad)
        if hit.size:
            j = hit[np.argmin(k[hit])]
            best, found = k[j], (np.int64(m1[j]), np.int64(m2[j]))
            if best == 0:
                break
    return found


def scan_any(n, qual):
    for m1, m2 in _pair_chunks(n):
        found = _first(m1, m2, ~qual[m1] & ~qual[m2])
        if found is not None:
            return found
    return np.int64(-1), np.int64(-1)


def classic_rs_direct(adj, n, r, s):
    S = _subsets(n)
    notS = ~S
    mem = _members(S, n)
    reach = np.zeros((S.size, n), dtype=bool)
    for v in range(n):
        reach[:, v] = np.bitwise_count(np.asarray(adj[v], dtype=np.int64) & notS) >= r
    reach &= mem
    x = reach.sum(axis=1)
    full = x == mem.sum(axis=1)
    low = S & -S
    for S1 in range(1, S.size):
        if full[S1]:
            continue
        cand = S[((S & S1) == 0) & (S != 0) & (low > (S1 & -S1))]
        bad = ~full[cand] & (x[S1] + x[cand] < s)
        hit = np.flatnonzero(bad)
        if hit.size:
            return np.int64(S1), np.int64(cand[hit[0]])
    return np.int64(-1), np.int64(-1)


def _padded(ptr, idx, n):
    """Closed neighborhoods in ascending id order, padded with -1."""
    deg = np.diff(ptr)
    d = int(deg.max()) + 1 if n else 1
    pad = np.full((n, d), -1, dtype=np.int64)
    for i in range(n):
        pad[i, :deg[i] + 1] = np.sort(np.append(idx[ptr[i]:ptr[i + 1]], i))
    return pad


def _step_padded(x, pad, colors, is_adv, F, rescue):
    n = x.shape[0]
    present = pad >= 0
    safe_pad = np.where(present, pad, 0)
    vals = x[safe_pad]
    xi = x[:, None]
    greater = present & (vals > xi)
    lower = present & (vals < xi)
    col = np.arange(pad.shape[1])
    # stable sorts keep ascending-id order among equal values
    oh = np.argsort(np.where(greater, -vals, np.inf), axis=1, kind="stable")
    ol = np.argsort(np.where(lower, vals, np.inf), axis=1, kind="stable")
    rank_h = np.empty_like(oh)
    rank_l = np.empty_like(ol)
    rows = np.arange(n)[:, None]
    rank_h[rows, oh] = col[None, :]
    rank_l[rows, ol] = col[None, :]
    r_hi = greater & (rank_h < F)
    r_lo = lower & (rank_l < F)
    keep = present & ~r_hi & ~r_lo
    if rescue:
        ncol = colors[safe_pad]
        cmax = ncol[np.arange(n), oh[:, 0]]
        cmin = ncol[np.arange(n), ol[:, 0]]
        keep |= r_hi & (ncol != cmax[:, None])
        keep |= r_lo & (ncol != cmin[:, None])
    # self is neither greater nor lower, so it is always kept; summing
    # column by column follows ascending id order like the numba kernel
    total = np.zeros(n)
    for k in range(pad.shape[1]):
        total += np.where(keep[:, k], vals[:, k], 0.0)
    count = keep.sum(axis=1)
    return np.where(is_adv, x, total / count)


def step_values(x, ptr, idx, colors, is_adv, F, rescue):
    return _step_padded(x, _padded(ptr, idx, x.shape[0]), colors, is_adv, F, rescue)


def simulate(ptr, idx, colors, x0, is_adv, adv_values, F, rescue, T,
             eps, early_stop, record, safety_tol):
    n = x0.shape[0]
    pad = _padded(ptr, idx, n)
    x = np.where(is_adv, adv_values[0], x0).astype(np.float64)
    states = np.empty((T + 1 if record else 1, n))
    states[0] = x
    normal = ~is_adv
    if normal.any():
        M0 = x[normal].max()
        m0 = x[normal].min()
    else:
        M0, m0 = -np.inf, np.inf
    safe = True
    agree = 0 if M0 - m0 < eps else -1
    steps = 0
    if agree == 0 and early_stop:
        return states, x, steps, agree, safe
    for t in range(T):
        x = _step_padded(x, pad, colors, is_adv, F, rescue)
        x = np.where(is_adv, adv_values[t + 1], x)
        steps = t + 1
        if normal.any():
            xn = x[normal]
            hi, lo = xn.max(), xn.min()
            if hi > M0 + safety_tol or lo < m0 - safety_tol:
                safe = False
        else:
            hi, lo = -np.inf, np.inf
        if record:
            states[t + 1] = x
        if agree < 0 and hi - lo < eps:
            agree = t + 1
            if early_stop:
                break
    return states, x, steps, agree, safe
