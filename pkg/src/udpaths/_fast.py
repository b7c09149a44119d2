"""Compiled DFS kernels for the optimized engine.

The kernels use CSR adjacency and 64-bit counters.  Callers must only use
them when ``n * maxdeg^(k-1)`` fits in a signed 64-bit integer; otherwise
the pure-Python bitset engine (unbounded integers) is used instead.
"""

from __future__ import annotations

import numpy as np

try:
    from numba import njit
except ImportError:  # pragma: no cover - exercised only without numba
    njit = None

INT64_SAFE = 2 ** 62


def available() -> bool:
    return njit is not None


def csr(adjacency) -> tuple[np.ndarray, np.ndarray]:
    n = len(adjacency)
    indptr = np.zeros(n + 1, dtype=np.int64)
    cols: list[int] = []
    for v, row in enumerate(adjacency):
        while row:
            low = row & -row
            cols.append(low.bit_length() - 1)
            row ^= low
        indptr[v + 1] = len(cols)
    return indptr, np.array(cols, dtype=np.int64)


def fits_int64(adjacency, k: int) -> bool:
    n = len(adjacency)
    maxdeg = max((row.bit_count() for row in adjacency), default=0)
    return n * max(maxdeg, 1) ** max(k - 1, 0) < INT64_SAFE


if njit is not None:

    @njit(cache=True)
    def _paths(indptr, indices, anti, k, starts, antipodal_free):
        n = indptr.shape[0] - 1
        visited = np.zeros(n, dtype=np.bool_)
        path = np.zeros(k, dtype=np.int64)
        ptr = np.zeros(k, dtype=np.int64)
        total = 0
        for s in starts:
            if k == 1:
                total += 1
                continue
            visited[s] = True
            path[0] = s
            ptr[0] = indptr[s]
            depth = 0
            while depth >= 0:
                v = path[depth]
                if depth == k - 2:
                    forbid = -1
                    if antipodal_free and depth >= 1:
                        forbid = anti[path[depth - 1]]
                    c = 0
                    for idx in range(indptr[v], indptr[v + 1]):
                        w = indices[idx]
                        if not visited[w] and w != forbid:
                            c += 1
                    total += c
                    visited[v] = False
                    depth -= 1
                    continue
                if ptr[depth] < indptr[v + 1]:
                    w = indices[ptr[depth]]
                    ptr[depth] += 1
                    if visited[w]:
                        continue
                    if antipodal_free and depth >= 1 and anti[path[depth - 1]] == w:
                        continue
                    depth += 1
                    path[depth] = w
                    visited[w] = True
                    ptr[depth] = indptr[w]
                else:
                    visited[v] = False
                    depth -= 1
        return total

    @njit(cache=True)
    def _popcount(x):
        x = x - ((x >> np.uint64(1)) & np.uint64(0x5555555555555555))
        x = (x & np.uint64(0x3333333333333333)) + ((x >> np.uint64(2)) & np.uint64(0x3333333333333333))
        x = (x + (x >> np.uint64(4))) & np.uint64(0x0F0F0F0F0F0F0F0F)
        return (x * np.uint64(0x0101010101010101)) >> np.uint64(56)

    @njit(cache=True)
    def _paths_two_level(indptr, indices, adjw, anti, k, starts, antipodal_free):
        """Same count as ``_paths`` for ``k >= 4``; the last two levels are
        closed-form: ``sum_{w in nb} deg(w) - sum_{u in blocked} |N(u) & nb|``."""
        n = indptr.shape[0] - 1
        nw = adjw.shape[1]
        deg = np.zeros(n, dtype=np.int64)
        nbr_deg = np.zeros(n, dtype=np.int64)
        for v in range(n):
            deg[v] = indptr[v + 1] - indptr[v]
        for v in range(n):
            t = 0
            for idx in range(indptr[v], indptr[v + 1]):
                t += deg[indices[idx]]
            nbr_deg[v] = t
        visited = np.zeros(n, dtype=np.bool_)
        vis_w = np.zeros(nw, dtype=np.uint64)
        nb = np.zeros(nw, dtype=np.uint64)
        path = np.zeros(k, dtype=np.int64)
        ptr = np.zeros(k, dtype=np.int64)
        one = np.uint64(1)
        total = 0
        for s in starts:
            visited[s] = True
            vis_w[s >> 6] |= one << np.uint64(s & 63)
            path[0] = s
            ptr[0] = indptr[s]
            depth = 0
            while depth >= 0:
                v = path[depth]
                if depth == k - 3:
                    # admissible middle vertices w
                    for j in range(nw):
                        nb[j] = adjw[v, j] & ~vis_w[j]
                    excl = -1
                    if antipodal_free and depth >= 1:
                        excl = anti[path[depth - 1]]
                        if excl >= 0:
                            nb[excl >> 6] &= ~(one << np.uint64(excl & 63))
                    c = nbr_deg[v]
                    # neighbours of v that are not admissible
                    for i in range(depth + 1):
                        u = path[i]
                        if (adjw[v, u >> 6] >> np.uint64(u & 63)) & one:
                            c -= deg[u]
                    if excl >= 0 and not visited[excl] and (adjw[v, excl >> 6] >> np.uint64(excl & 63)) & one:
                        c -= deg[excl]
                    # final vertices x must avoid the path and anti(v)
                    for i in range(depth + 1):
                        u = path[i]
                        for j in range(nw):
                            c -= np.int64(_popcount(adjw[u, j] & nb[j]))
                    if antipodal_free:
                        a = anti[v]
                        if a >= 0 and not visited[a]:
                            for j in range(nw):
                                c -= np.int64(_popcount(adjw[a, j] & nb[j]))
                    total += c
                    visited[v] = False
                    vis_w[v >> 6] &= ~(one << np.uint64(v & 63))
                    depth -= 1
                    continue
                if ptr[depth] < indptr[v + 1]:
                    w = indices[ptr[depth]]
                    ptr[depth] += 1
                    if visited[w]:
                        continue
                    if antipodal_free and depth >= 1 and anti[path[depth - 1]] == w:
                        continue
                    depth += 1
                    path[depth] = w
                    visited[w] = True
                    vis_w[w >> 6] |= one << np.uint64(w & 63)
                    ptr[depth] = indptr[w]
                else:
                    visited[v] = False
                    vis_w[v >> 6] &= ~(one << np.uint64(v & 63))
                    depth -= 1
        return total

    @njit(cache=True)
    def _cycles(indptr, indices, k, starts):
        n = indptr.shape[0] - 1
        visited = np.zeros(n, dtype=np.bool_)
        closes = np.zeros(n, dtype=np.bool_)
        path = np.zeros(k, dtype=np.int64)
        ptr = np.zeros(k, dtype=np.int64)
        total = 0
        for s in starts:
            for idx in range(indptr[s], indptr[s + 1]):
                closes[indices[idx]] = True
            visited[s] = True
            path[0] = s
            ptr[0] = indptr[s]
            depth = 0
            while depth >= 0:
                v = path[depth]
                if depth == k - 2:
                    second = path[1]
                    c = 0
                    for idx in range(indptr[v], indptr[v + 1]):
                        w = indices[idx]
                        if w > second and closes[w] and not visited[w]:
                            c += 1
                    total += c
                    visited[v] = False
                    depth -= 1
                    continue
                if ptr[depth] < indptr[v + 1]:
                    w = indices[ptr[depth]]
                    ptr[depth] += 1
                    if w <= s or visited[w]:
                        continue
                    depth += 1
                    path[depth] = w
                    visited[w] = True
                    ptr[depth] = indptr[w]
                else:
                    visited[v] = False
                    depth -= 1
            for idx in range(indptr[s], indptr[s + 1]):
                closes[indices[idx]] = False
        return total


def words(adjacency) -> np.ndarray:
    """Adjacency as an ``(n, ceil(n/64))`` array of uint64 bitset words."""
    n = len(adjacency)
    w = max(1, (n + 63) // 64)
    out = np.zeros((n, w), dtype=np.uint64)
    mask = (1 << 64) - 1
    for v, row in enumerate(adjacency):
        for j in range(w):
            out[v, j] = (row >> (64 * j)) & mask
    return out


def ordered_paths(adjacency, k: int, antipode=None, starts=None) -> int:
    indptr, indices = csr(adjacency)
    n = len(adjacency)
    anti = np.array(antipode if antipode is not None else [-1] * n, dtype=np.int64)
    st = np.array(range(n) if starts is None else starts, dtype=np.int64)
    if k >= 4:
        return int(_paths_two_level(indptr, indices, words(adjacency), anti, k, st,
                                    antipode is not None))
    return int(_paths(indptr, indices, anti, k, st, antipode is not None))


def cycles(adjacency, k: int, starts=None) -> int:
    indptr, indices = csr(adjacency)
    n = len(adjacency)
    st = np.array(range(n) if starts is None else starts, dtype=np.int64)
    return int(_cycles(indptr, indices, k, st))
