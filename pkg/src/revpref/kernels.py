"""Kernel dispatch: compiled int64 walk tables with a pure-Python fallback.

The cycle searches spend essentially all their time filling walk tables,
so those loops ship as a compiled extension (built at install time) with
a pure-Python twin.  Dispatch picks the compiled kernels when they are
importable, ``REVPREF_PURE`` is not set, and a worst-case bound on every
partial sum fits comfortably in int64; otherwise the big-int fallback
runs.  Both produce identical tables, including predecessor tie-breaking,
so callers never see the difference.
"""

from __future__ import annotations

import os
from typing import Sequence

import numpy as np

from . import _kernel_py
from .core import ArcLengths

try:  # pragma: no cover - exercised only when the extension is absent
    from . import _speedups as _compiled
except ImportError:  # pragma: no cover
    _compiled = None

COMPILED_AVAILABLE = _compiled is not None
_INF = 2**62
_LIMIT = 2**61


def active_kernel() -> str:
    """Which implementation dispatch currently prefers."""
    if COMPILED_AVAILABLE and not os.environ.get("REVPREF_PURE"):
        return "compiled"
    return "pure"


def _max_abs(arc: ArcLengths) -> int:
    worst = 0
    for row in arc.num:
        for cell in row:
            if cell is not None and abs(cell) > worst:
                worst = abs(cell)
    return worst


def _fits_int64(arc: ArcLengths, steps: int, extra: int = 0) -> bool:
    """True when every partial sum of ≤ steps arcs (plus a seed) fits int64."""
    scale = max(_max_abs(arc), extra)
    return (steps + 2) * scale < _LIMIT


def _np_matrix(arc: ArcLengths) -> np.ndarray:
    return np.array(
        [[_INF if cell is None else cell for cell in row] for row in arc.num],
        dtype=np.int64,
    )


class KarpTables:
    """Minimum walk totals by exact arc count, ending anywhere.

    ``D[m][v]`` is the minimum total over walks of exactly ``m`` arcs
    ending at ``v`` (``None`` if none), for ``m = 0..n``; ``pred(m, v)``
    is the predecessor attaining it.
    """

    def __init__(self, D: list[list[int | None]], P, compiled: bool):
        self.D = D
        self._P = P
        self.compiled = compiled

    def pred(self, m: int, v: int) -> int:
        return int(self._P[m][v])


class WalkTables:
    """Minimum walk totals by endpoints and exact arc count ``m ≤ kmax``."""

    def __init__(self, B, P, n: int, kmax: int, compiled: bool):
        self._B = B
        self._P = P
        self.n = n
        self.kmax = kmax
        self.compiled = compiled

    def closed(self, m: int) -> list[int | None]:
        """Minimum totals of closed walks of exactly ``m`` arcs, per vertex."""
        if self.compiled:
            return [None if x == _INF else x for x in self._B[m].diagonal().tolist()]
        return [self._B[m][u][u] for u in range(self.n)]

    def pred(self, m: int, u: int, v: int) -> int:
        return int(self._P[m][u][v])


def karp_tables(arc: ArcLengths) -> KarpTables:
    if active_kernel() == "compiled" and _fits_int64(arc, arc.n + 1):
        D_arr, P_arr = _compiled.karp_tables(_np_matrix(arc), arc.n)
        D = [
            [None if cell == _INF else cell for cell in row]
            for row in D_arr.tolist()
        ]
        return KarpTables(D, P_arr, compiled=True)
    D, P = _kernel_py.karp_tables(arc.num, arc.n)
    return KarpTables(D, P, compiled=False)


def closed_walk_tables(arc: ArcLengths, kmax: int) -> WalkTables:
    if active_kernel() == "compiled" and _fits_int64(arc, kmax):
        B, P = _compiled.closed_walk_tables(_np_matrix(arc), arc.n, kmax)
        return WalkTables(B, P, arc.n, kmax, compiled=True)
    B, P = _kernel_py.closed_walk_tables(arc.num, arc.n, kmax)
    return WalkTables(B, P, arc.n, kmax, compiled=False)


def shortest_from(arc: ArcLengths, init: Sequence[int | None]) -> list[int | None]:
    """Multi-seed shortest walk totals; ``init[v] = None`` means unseeded."""
    seed_abs = max((abs(v) for v in init if v is not None), default=0)
    if active_kernel() == "compiled" and _fits_int64(arc, arc.n + 1, seed_abs):
        seeds = np.array([_INF if v is None else v for v in init], dtype=np.int64)
        dist = _compiled.shortest_from(_np_matrix(arc), arc.n, seeds)
        return [None if cell == _INF else cell for cell in dist.tolist()]
    return _kernel_py.shortest_from(arc.num, arc.n, list(init))
