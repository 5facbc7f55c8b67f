"""Pure-Python walk-table kernels.

Fallback twin of the compiled extension module: same tables, same
tie-breaking (ascending predecessor scan with strict improvement), but
arbitrary-precision integers and ``None`` instead of a finite infinity
sentinel.  Either implementation may serve any call; results are
identical wherever both are applicable.

All kernels take an ``n x n`` matrix of integer arc lengths (``None`` =
absent arc) sharing one implicit denominator, which never matters here:
the tables are pure integer arithmetic.
"""

from __future__ import annotations

from typing import Sequence

Matrix = Sequence[Sequence[int | None]]


def karp_tables(num: Matrix, n: int) -> tuple[list[list[int | None]], list[list[int]]]:
    """Minimum walk totals by exact arc count, from everywhere.

    Returns ``(D, P)`` with ``D[m][v]`` the minimum total over walks of
    exactly ``m`` arcs ending at ``v`` (any start vertex; ``None`` if no
    such walk) for ``m = 0..n``, and ``P[m][v]`` the predecessor vertex
    attaining it (``-1`` at level 0).  Ties resolve to the smallest
    predecessor id.
    """
    D: list[list[int | None]] = [[0] * n]
    P: list[list[int]] = [[-1] * n]
    for _m in range(1, n + 1):
        prev = D[-1]
        row: list[int | None] = [None] * n
        pred: list[int] = [-1] * n
        for v in range(n):
            best: int | None = None
            best_u = -1
            for u in range(n):
                du = prev[u]
                if du is None:
                    continue
                arc = num[u][v]
                if arc is None:
                    continue
                cand = du + arc
                if best is None or cand < best:
                    best = cand
                    best_u = u
            row[v] = best
            pred[v] = best_u
        D.append(row)
        P.append(pred)
    return D, P


def closed_walk_tables(
    num: Matrix, n: int, kmax: int
) -> tuple[list[list[list[int | None]]], list[list[list[int]]]]:
    """Minimum walk totals by endpoints and exact arc count.

    Returns ``(B, P)`` with ``B[m][u][v]`` the minimum total over walks
    from ``u`` to ``v`` with exactly ``m`` arcs, for ``m = 0..kmax``, and
    ``P[m][u][v]`` the vertex preceding ``v`` on that walk.  Ties resolve
    to the smallest predecessor id.
    """
    B: list[list[list[int | None]]] = [
        [[0 if u == v else None for v in range(n)] for u in range(n)]
    ]
    P: list[list[list[int]]] = [[[-1] * n for _ in range(n)]]
    for _m in range(1, kmax + 1):
        prev = B[-1]
        level: list[list[int | None]] = []
        plevel: list[list[int]] = []
        for u in range(n):
            prow = prev[u]
            row: list[int | None] = [None] * n
            pred: list[int] = [-1] * n
            for v in range(n):
                best: int | None = None
                best_x = -1
                for x in range(n):
                    dx = prow[x]
                    if dx is None:
                        continue
                    arc = num[x][v]
                    if arc is None:
                        continue
                    cand = dx + arc
                    if best is None or cand < best:
                        best = cand
                        best_x = x
                row[v] = best
                pred[v] = best_x
            level.append(row)
            plevel.append(pred)
        B.append(level)
        P.append(plevel)
    return B, P


def shortest_from(num: Matrix, n: int, init: Sequence[int | None]) -> list[int | None]:
    """Single-source-style shortest walk totals by relaxation.

    ``init[v]`` seeds vertex ``v`` (``None`` = not a source).  Requires a
    graph with no negative cycle reachable from a seed; raises ValueError
    otherwise.  Returns final distances (``None`` = unreachable).
    """
    dist: list[int | None] = list(init)
    for _round in range(n + 1):
        changed = False
        for u in range(n):
            du = dist[u]
            if du is None:
                continue
            row = num[u]
            for w in range(n):
                arc = row[w]
                if arc is None:
                    continue
                cand = du + arc
                dw = dist[w]
                if dw is None or cand < dw:
                    dist[w] = cand
                    changed = True
        if not changed:
            return dist
    raise ValueError("negative cycle reachable from a seed vertex")
