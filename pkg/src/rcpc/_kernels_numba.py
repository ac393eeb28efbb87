"""numba kernels.  Signatures and results match ``_kernels_numpy`` exactly."""
from __future__ import annotations

import numpy as np
from numba import njit


@njit(cache=True)
def _popcount(x):
    c = 0
    while x:
        x &= x - 1
        c += 1
    return c


@njit(cache=True)
def _color_adjacency(adj, colors, n, ncol):
    # adjc[v, c]: neighbors of v having color c, as a bitmask
    adjc = np.zeros((n, ncol), dtype=np.int64)
    for v in range(n):
        for u in range(n):
            if (adj[v] >> u) & 1:
                adjc[v, colors[u]] |= np.int64(1) << u
    return adjc


@njit(cache=True)
def rs_subset_tables(adj, colors, n, ncol, r):
    """Per subset S: whether every node of S is r-valid, the number of
    r-valid nodes, and the bitmask of colors present among them."""
    adjc = _color_adjacency(adj, colors, n, ncol)
    size = np.int64(1) << n
    full = np.zeros(size, dtype=np.bool_)
    cnt = np.zeros(size, dtype=np.int64)
    cmask = np.zeros(size, dtype=np.int64)
    for S in range(1, size):
        notS = ~np.int64(S)
        k = 0
        cm = np.int64(0)
        members = 0
        for v in range(n):
            if not (S >> v) & 1:
                continue
            members += 1
            distinct = 0
            valid = False
            for c in range(ncol):
                m = _popcount(adjc[v, c] & notS)
                if m > 0:
                    distinct += 1
                    if m >= r:
                        valid = True
            if distinct >= 2:
                valid = True
            if valid:
                k += 1
                cm |= np.int64(1) << colors[v]
        full[S] = k == members
        cnt[S] = k
        cmask[S] = cm
    return full, cnt, cmask


@njit(cache=True)
def qualify_table(adj, colors, n, ncol, r):
    """Per subset S: whether some node of S has >= r outside neighbors or
    >= 3 distinct outside neighbor colors."""
    adjc = _color_adjacency(adj, colors, n, ncol)
    size = np.int64(1) << n
    qual = np.zeros(size, dtype=np.bool_)
    for S in range(1, size):
        notS = ~np.int64(S)
        for v in range(n):
            if not (S >> v) & 1:
                continue
            if _popcount(adj[v] & notS) >= r:
                qual[S] = True
                break
            distinct = 0
            for c in range(ncol):
                if adjc[v, c] & notS:
                    distinct += 1
            if distinct >= 3:
                qual[S] = True
                break
    return qual


@njit(cache=True)
def _next_pair(digits, n, state):
    # advance the ternary odometer; state = [m1, m2]
    i = 0
    while i < n:
        bit = np.int64(1) << i
        d = digits[i]
        if d == 0:
            digits[i] = 1
            state[0] |= bit
            return True
        elif d == 1:
            digits[i] = 2
            state[0] &= ~bit
            state[1] |= bit
            return True
        digits[i] = 0
        state[1] &= ~bit
        i += 1
    return False


@njit(cache=True)
def scan_rs(n, full, cnt, cmask, s):
    """First canonical pair (ternary order) violating all four clauses,
    or (-1, -1)."""
    digits = np.zeros(n, dtype=np.int64)
    state = np.zeros(2, dtype=np.int64)
    while _next_pair(digits, n, state):
        m1 = state[0]
        m2 = state[1]
        if m1 == 0 or m2 == 0:
            continue
        u = m1 | m2
        if (u & -u & m1) == 0:
            continue
        if full[m1] or full[m2]:
            continue
        if _popcount(cmask[m1] | cmask[m2]) >= 2:
            continue
        if cnt[m1] + cnt[m2] >= s:
            continue
        return m1, m2
    return np.int64(-1), np.int64(-1)


@njit(cache=True)
def scan_rs_fewest(n, full, cnt, cmask, s):
    """Violating pair with the fewest valid nodes (first in ternary order
    among ties), or (-1, -1)."""
    digits = np.zeros(n, dtype=np.int64)
    state = np.zeros(2, dtype=np.int64)
    b1 = np.int64(-1)
    b2 = np.int64(-1)
    best = s
    while _next_pair(digits, n, state):
        m1 = state[0]
        m2 = state[1]
        if m1 == 0 or m2 == 0:
            continue
        u = m1 | m2
        if (u & -u & m1) == 0:
            continue
        if full[m1] or full[m2]:
            continue
        if _popcount(cmask[m1] | cmask[m2]) >= 2:
            continue
        k = cnt[m1] + cnt[m2]
        if k < best:
            best = k
            b1 = m1
            b2 = m2
            if k == 0:
                break
    return b1, b2


@njit(cache=True)
def scan_any(n, qual):
    """First canonical pair where neither side qualifies, or (-1, -1)."""
    digits = np.zeros(n, dtype=np.int64)
    state = np.zeros(2, dtype=np.int64)
    while _next_pair(digits, n, state):
        m1 = state[0]
        m2 = state[1]
        if m1 == 0 or m2 == 0:
            continue
        u = m1 | m2
        if (u & -u & m1) == 0:
            continue
        if qual[m1] or qual[m2]:
            continue
        return m1, m2
    return np.int64(-1), np.int64(-1)


@njit(cache=True)
def classic_rs_direct(adj, n, r, s):
    """Classical (r,s)-robustness straight from the definition: every pair
    of nonempty disjoint sets has a fully r-reachable side or at least s
    r-reachable nodes in total.  Enumerates S1 and the submasks of its
    complement; returns a violating pair or (-1, -1)."""
    allm = (np.int64(1) << n) - 1
    for S1 in range(1, allm + 1):
        notS1 = ~np.int64(S1)
        x1 = 0
        size1 = 0
        for v in range(n):
            if (S1 >> v) & 1:
                size1 += 1
                if _popcount(adj[v] & notS1) >= r:
                    x1 += 1
        if x1 == size1:
            continue
        low1 = S1 & -S1
        rest = allm & notS1
        S2 = rest
        while S2 > 0:
            # unordered pairs: S1 holds the lowest node of the union
            if (S2 & -S2) > low1:
                notS2 = ~np.int64(S2)
                x2 = 0
                size2 = 0
                for v in range(n):
                    if (S2 >> v) & 1:
                        size2 += 1
                        if _popcount(adj[v] & notS2) >= r:
                            x2 += 1
                if x2 != size2 and x1 + x2 < s:
                    return np.int64(S1), np.int64(S2)
            S2 = (S2 - 1) & rest
    return np.int64(-1), np.int64(-1)


@njit(cache=True)
def _update(i, x, ptr, idx, colors, F, rescue):
    xi = x[i]
    start = ptr[i]
    stop = ptr[i + 1]
    d = stop - start
    keep = np.ones(d, dtype=np.bool_)
    hi_val = np.empty(d)
    hi_pos = np.empty(d, dtype=np.int64)
    lo_val = np.empty(d)
    lo_pos = np.empty(d, dtype=np.int64)
    nh = 0
    nl = 0
    for k in range(d):
        xj = x[idx[start + k]]
        if xj > xi:
            hi_val[nh] = -xj
            hi_pos[nh] = k
            nh += 1
        elif xj < xi:
            lo_val[nl] = xj
            lo_pos[nl] = k
            nl += 1
    # neighbor ids are ascending, so a stable sort breaks value ties by id
    oh = np.argsort(hi_val[:nh], kind="mergesort")
    ol = np.argsort(lo_val[:nl], kind="mergesort")
    kh = min(F, nh)
    kl = min(F, nl)
    for q in range(kh):
        keep[hi_pos[oh[q]]] = False
    for q in range(kl):
        keep[lo_pos[ol[q]]] = False
    if rescue:
        if kh > 0:
            cmax = colors[idx[start + hi_pos[oh[0]]]]
            for q in range(1, kh):
                if colors[idx[start + hi_pos[oh[q]]]] != cmax:
                    keep[hi_pos[oh[q]]] = True
        if kl > 0:
            cmin = colors[idx[start + lo_pos[ol[0]]]]
            for q in range(1, kl):
                if colors[idx[start + lo_pos[ol[q]]]] != cmin:
                    keep[lo_pos[ol[q]]] = True
    # sum in ascending id order (self included) so equal considered sets
    # give bit-identical results
    total = 0.0
    count = 0
    self_done = False
    for k in range(d):
        j = idx[start + k]
        if not self_done and j > i:
            total += xi
            count += 1
            self_done = True
        if keep[k]:
            total += x[j]
            count += 1
    if not self_done:
        total += xi
        count += 1
    return total / count


@njit(cache=True)
def step_values(x, ptr, idx, colors, is_adv, F, rescue):
    """One synchronous update of all normal nodes; adversary entries are
    left as they are."""
    n = x.shape[0]
    out = x.copy()
    for i in range(n):
        if not is_adv[i]:
            out[i] = _update(i, x, ptr, idx, colors, F, rescue)
    return out


@njit(cache=True)
def simulate(ptr, idx, colors, x0, is_adv, adv_values, F, rescue, T,
             eps, early_stop, record, safety_tol):
    """Run ``T`` synchronous rounds.

    Returns (states, final, steps_run, agree_step, safe).  ``states`` has
    T+1 rows when ``record`` else a single row.  ``agree_step`` is the first
    step with normal spread < eps (-1 if never).
    """
    n = x0.shape[0]
    x = x0.copy()
    for i in range(n):
        if is_adv[i]:
            x[i] = adv_values[0, i]
    rows = T + 1 if record else 1
    states = np.empty((rows, n))
    states[0] = x
    M0 = -np.inf
    m0 = np.inf
    for i in range(n):
        if not is_adv[i]:
            M0 = max(M0, x[i])
            m0 = min(m0, x[i])
    safe = True
    agree = -1
    if M0 - m0 < eps:
        agree = 0
    steps = 0
    if agree == 0 and early_stop:
        return states, x, steps, agree, safe
    for t in range(T):
        xn = step_values(x, ptr, idx, colors, is_adv, F, rescue)
        for i in range(n):
            if is_adv[i]:
                xn[i] = adv_values[t + 1, i]
        x = xn
        steps = t + 1
        hi = -np.inf
        lo = np.inf
        for i in range(n):
            if not is_adv[i]:
                v = x[i]
                if v > M0 + safety_tol or v < m0 - safety_tol:
                    safe = False
                hi = max(hi, v)
                lo = min(lo, v)
        if record:
            states[t + 1] = x
        if agree < 0 and hi - lo < eps:
            agree = t + 1
            if early_stop:
                break
    return states, x, steps, agree, safe
