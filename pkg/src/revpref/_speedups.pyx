# cython: language_level=3, boundscheck=False, wraparound=False, initializedcheck=False
"""Compiled walk-table kernels (int64 twin of the pure-Python module).

Absent arcs and unreachable table cells use the sentinel ``INF``; the
dispatcher guarantees all finite values and partial sums stay well below
it.  Tie-breaking matches the pure kernels exactly: ascending candidate
scan, strict improvement.
"""

import numpy as np

cimport numpy as cnp

cnp.import_array()

INF = 2 ** 62

cdef long long C_INF = 4611686018427387904LL  # 2**62
cdef long long C_FLOOR = -2305843009213693952LL  # -(2**61)


def karp_tables(cnp.int64_t[:, :] num, int n):
    """int64 twin of the fallback ``karp_tables``; INF marks absent/unreachable."""
    D_arr = np.full((n + 1, n), C_INF, dtype=np.int64)
    P_arr = np.full((n + 1, n), -1, dtype=np.int64)
    cdef cnp.int64_t[:, :] D = D_arr
    cdef cnp.int64_t[:, :] P = P_arr
    cdef int m, u, v, best_u
    cdef long long du, arc, cand, best
    for v in range(n):
        D[0, v] = 0
    for m in range(1, n + 1):
        for v in range(n):
            best = C_INF
            best_u = -1
            for u in range(n):
                du = D[m - 1, u]
                if du == C_INF:
                    continue
                arc = num[u, v]
                if arc == C_INF:
                    continue
                cand = du + arc
                if best_u < 0 or cand < best:
                    best = cand
                    best_u = u
            D[m, v] = best
            P[m, v] = best_u
    return D_arr, P_arr


def closed_walk_tables(cnp.int64_t[:, :] num, int n, int kmax):
    """int64 twin of the fallback ``closed_walk_tables``."""
    B_arr = np.full((kmax + 1, n, n), C_INF, dtype=np.int64)
    P_arr = np.full((kmax + 1, n, n), -1, dtype=np.int64)
    cdef cnp.int64_t[:, :, :] B = B_arr
    cdef cnp.int64_t[:, :, :] P = P_arr
    cdef int m, u, v, x, best_x
    cdef long long dx, arc, cand, best
    for u in range(n):
        B[0, u, u] = 0
    for m in range(1, kmax + 1):
        for u in range(n):
            for v in range(n):
                best = C_INF
                best_x = -1
                for x in range(n):
                    dx = B[m - 1, u, x]
                    if dx == C_INF:
                        continue
                    arc = num[x, v]
                    if arc == C_INF:
                        continue
                    cand = dx + arc
                    if best_x < 0 or cand < best:
                        best = cand
                        best_x = x
                B[m, u, v] = best
                P[m, u, v] = best_x
    return B_arr, P_arr


def shortest_from(cnp.int64_t[:, :] num, int n, cnp.int64_t[:] init):
    """int64 twin of the fallback ``shortest_from``; raises on a negative cycle."""
    dist_arr = np.array(init, dtype=np.int64)
    cdef cnp.int64_t[:] dist = dist_arr
    cdef int u, w, rounds
    cdef long long du, arc, cand
    cdef bint changed
    for rounds in range(n + 1):
        changed = False
        for u in range(n):
            du = dist[u]
            if du == C_INF:
                continue
            for w in range(n):
                arc = num[u, w]
                if arc == C_INF:
                    continue
                cand = du + arc
                if cand < C_FLOOR:
                    # the dispatcher bounds all legitimate totals well above
                    # this floor, so only a negative cycle can reach it
                    raise ValueError("negative cycle reachable from a seed vertex")
                if cand < dist[w]:
                    dist[w] = cand
                    changed = True
        if not changed:
            return dist_arr
    raise ValueError("negative cycle reachable from a seed vertex")
