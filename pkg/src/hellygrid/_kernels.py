"""Compiled inner loops of the largest-empty-convex-polygon search.

Points arrive translated so every coordinate is a small non-negative
int64 and lexicographically sorted.  For an anchor ``a`` only points
after it are candidates, so ``a`` is the lexicographic minimum of any
polygon built from it.  Candidates are sorted by angle around the
anchor, one point per ray (the nearest), and the visibility graph of
that star-shaped fan is built with the queue procedure of Dobkin,
Edelsbrunner and Overmars.  Cross products stay exact while the
coordinate span is below 2**30.
"""

import numpy as np
from numba import njit

ERR_SORT = -1


@njit(cache=True)
def _fan(X, Y, a):
    """Candidates of anchor ``a``: nearest point per ray, in increasing angle.

    Returns (idx, vx, vy, ok) with coordinates relative to the anchor.
    """
    n = X.shape[0]
    m = n - a - 1
    dx = np.empty(m, np.int64)
    dy = np.empty(m, np.int64)
    key = np.empty(m, np.float64)
    for t in range(m):
        dx[t] = X[a + 1 + t] - X[a]
        dy[t] = Y[a + 1 + t] - Y[a]
        key[t] = np.arctan2(float(dy[t]), float(dx[t]))
    order = np.argsort(key, kind="mergesort")
    idx = np.empty(m, np.int64)
    vx = np.empty(m, np.int64)
    vy = np.empty(m, np.int64)
    k = 0
    for s in range(m):
        t = order[s]
        if k > 0 and vx[k - 1] * dy[t] - vy[k - 1] * dx[t] == 0:
            # same ray as the kept point; keep the nearer one
            if dx[t] * dx[t] + dy[t] * dy[t] < vx[k - 1] * vx[k - 1] + vy[k - 1] * vy[k - 1]:
                idx[k - 1] = a + 1 + t
                vx[k - 1] = dx[t]
                vy[k - 1] = dy[t]
            continue
        idx[k] = a + 1 + t
        vx[k] = dx[t]
        vy[k] = dy[t]
        k += 1
    ok = True
    for s in range(k - 1):
        if vx[s] * vy[s + 1] - vy[s] * vx[s + 1] <= 0:
            ok = False
    return idx[:k], vx[:k], vy[:k], ok


@njit(cache=True)
def _left(vx, vy, i, j, k):
    return (vx[j] - vx[i]) * (vy[k] - vy[i]) - (vy[j] - vy[i]) * (vx[k] - vx[i]) > 0


@njit(cache=True)
def _grow(arr, size):
    out = np.empty(max(size, 2 * arr.shape[0]), arr.dtype)
    out[: arr.shape[0]] = arr
    return out


@njit(cache=True)
def visibility(vx, vy):
    """Edges (i, j), i < j, such that the triangle (anchor, v_i, v_j) is empty.

    Returns (src, dst, E).  Edges into each vertex are produced in queue
    order; emptiness is closed, collinear blockers block.
    """
    m = vx.shape[0]
    cap = max(16, 4 * m)
    src = np.empty(cap, np.int64)
    dst = np.empty(cap, np.int64)
    qnext = np.empty(cap, np.int64)
    head = np.full(m, -1, np.int64)
    tail = np.full(m, -1, np.int64)
    si = np.empty(m + 1, np.int64)
    sj = np.empty(m + 1, np.int64)
    E = 0
    for start in range(m - 1):
        top = 0
        si[0] = start
        sj[0] = start + 1
        top = 1
        while top > 0:
            i = si[top - 1]
            j = sj[top - 1]
            e = head[i]
            if e != -1 and _left(vx, vy, src[e], i, j):
                head[i] = qnext[e]
                si[top] = src[e]
                sj[top] = j
                top += 1
                continue
            if E == src.shape[0]:
                src = _grow(src, E + 1)
                dst = _grow(dst, E + 1)
                qnext = _grow(qnext, E + 1)
            src[E] = i
            dst[E] = j
            qnext[E] = -1
            if tail[j] == -1:
                head[j] = E
            else:
                qnext[tail[j]] = E
            tail[j] = E
            E += 1
            top -= 1
    return src[:E], dst[:E], E


@njit(cache=True)
def chain_lengths(vx, vy, src, dst, E):
    """R[e]: most vertices of a convex chain starting with edge e (counting both ends).

    Also returns CSR out-adjacency (outptr, outedge) for reconstruction.
    """
    m = vx.shape[0]
    outdeg = np.zeros(m + 1, np.int64)
    indeg = np.zeros(m + 1, np.int64)
    for e in range(E):
        outdeg[src[e] + 1] += 1
        indeg[dst[e] + 1] += 1
    outptr = np.cumsum(outdeg)
    inptr = np.cumsum(indeg)
    outedge = np.empty(E, np.int64)
    inedge = np.empty(E, np.int64)
    ofill = outptr[:-1].copy()
    ifill = inptr[:-1].copy()
    for e in range(E):
        outedge[ofill[src[e]]] = e
        ofill[src[e]] += 1
        inedge[ifill[dst[e]]] = e
        ifill[dst[e]] += 1
    R = np.full(E, 2, np.int64)
    for j in range(m - 1, -1, -1):
        for a in range(inptr[j], inptr[j + 1]):
            e = inedge[a]
            i = src[e]
            best = 2
            for b in range(outptr[j], outptr[j + 1]):
                f = outedge[b]
                if R[f] + 1 > best and _left(vx, vy, i, j, dst[f]):
                    best = R[f] + 1
            R[e] = best
    return R, outptr, outedge


@njit(cache=True)
def anchor_best(X, Y):
    """Largest empty convex polygon size per anchor (0 when none).

    Returns (best, edges, status); status is ERR_SORT if an angular order
    could not be certified exactly, else 0.
    """
    n = X.shape[0]
    best = np.zeros(n, np.int64)
    edges = 0
    for a in range(n):
        idx, vx, vy, ok = _fan(X, Y, a)
        if not ok:
            return best, edges, ERR_SORT
        if vx.shape[0] < 2:
            continue
        src, dst, E = visibility(vx, vy)
        edges += E
        R, outptr, outedge = chain_lengths(vx, vy, src, dst, E)
        top = 0
        for e in range(E):
            if R[e] > top:
                top = R[e]
        best[a] = top + 1
    return best, edges, 0


@njit(cache=True)
def reconstruct(X, Y, a, size):
    """Lexicographically smallest vertex list (original indices) of a ``size``-gon at ``a``."""
    idx, vx, vy, ok = _fan(X, Y, a)
    out = np.full(size, -1, np.int64)
    if not ok or size < 3:
        return out
    src, dst, E = visibility(vx, vy)
    R, outptr, outedge = chain_lengths(vx, vy, src, dst, E)
    need = size - 1
    first = -1
    for e in range(E):
        if R[e] == need and (first == -1 or idx[src[e]] < idx[src[first]] or (
            src[e] == src[first] and idx[dst[e]] < idx[dst[first]]
        )):
            first = e
    if first == -1:
        return out
    out[0] = a
    out[1] = idx[src[first]]
    out[2] = idx[dst[first]]
    prev = src[first]
    cur = dst[first]
    r = need
    pos = 3
    while r > 2:
        pick = -1
        for b in range(outptr[cur], outptr[cur + 1]):
            f = outedge[b]
            if R[f] == r - 1 and _left(vx, vy, prev, cur, dst[f]):
                if pick == -1 or idx[dst[f]] < idx[dst[pick]]:
                    pick = f
        if pick == -1:
            return np.full(size, -1, np.int64)
        out[pos] = idx[dst[pick]]
        pos += 1
        prev = cur
        cur = dst[pick]
        r -= 1
    return out
