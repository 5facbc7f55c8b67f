"""Cycle analysis over bidding graphs.

Rule verdicts reduce to questions about cycle means: the overall minimum
mean length decides full consistency, and the minimum over cycles of
bounded cardinality decides the k-bounded rules.  Everything here is
exact, and every reported value comes with a simple-cycle certificate
whose mean is re-derived from the arc lengths before it leaves this
module.

Accepted inputs are either a BiddingGraph or a bare ArcLengths matrix
(fixtures); certificates carry witness rounds only in the former case.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Iterator, Sequence

from . import kernels
from .core import ArcLengths, BiddingGraph, CycleCertificate

GraphLike = BiddingGraph | ArcLengths


@dataclass(frozen=True)
class MeanCycleResult:
    """Minimum mean cycle length with its certificate.

    Both fields are None exactly when the graph has no cycle at all
    (e.g. a single-bundle session).
    """

    mu: Fraction | None
    certificate: CycleCertificate | None

    @property
    def is_acyclic(self) -> bool:
        return self.mu is None


@dataclass(frozen=True)
class BoundedCycleReport:
    """Minimum-mean cycle among simple cycles of cardinality ≤ k+1.

    ``worst`` is None when no such cycle exists; otherwise it is the
    bounded minimum-mean cycle, whatever its sign.
    """

    k: int
    worst: CycleCertificate | None


def _split(g: GraphLike) -> tuple[ArcLengths, BiddingGraph | None]:
    if isinstance(g, BiddingGraph):
        return g.lengths, g
    return g, None


def _canonical_rotation(vertices: Sequence[int]) -> tuple[int, ...]:
    pivot = vertices.index(min(vertices))
    return tuple(vertices[pivot:]) + tuple(vertices[:pivot])


def _certificate(
    arc: ArcLengths, vertices: Sequence[int], graph: BiddingGraph | None
) -> CycleCertificate:
    verts = _canonical_rotation(vertices)
    card = len(verts)
    total = Fraction(0)
    witnesses: list[int] = []
    for i in range(card):
        u, w = verts[i], verts[(i + 1) % card]
        length = arc.length(u, w)
        assert length is not None, "certificate uses a missing arc"
        total += length
        if graph is not None:
            t = graph.arc_witness(u, w)
            assert t is not None
            witnesses.append(t)
    return CycleCertificate(
        vertices=verts,
        total_length=total,
        mean_length=total / card,
        witness_rounds=tuple(witnesses) if graph is not None else None,
    )


def min_mean_cycle(g: GraphLike) -> MeanCycleResult:
    """Exact minimum mean cycle length, with a certificate cycle.

    Runs the walk-table characterization: with ``D[m][v]`` the minimum
    total over m-arc walks ending at v (from anywhere), the minimum cycle
    mean equals ``min_v max_m (D[n][v] - D[m][v]) / (n - m)``.  The
    certificate comes from a second pass over lengths shifted down by the
    mean, where some optimal n-arc walk must traverse a zero-shifted-mean
    cycle; the repeated vertex nearest the walk's end excises it.
    """
    arc, graph = _split(g)
    n = arc.n
    D = kernels.karp_tables(arc).D

    best_num = best_den = 0
    found = False
    for v in range(n):
        dn = D[n][v]
        if dn is None:
            continue
        in_num, in_den = 0, 0
        for m in range(n):
            dm = D[m][v]
            if dm is None:
                continue
            cand_num, cand_den = dn - dm, n - m
            if in_den == 0 or cand_num * in_den > in_num * cand_den:
                in_num, in_den = cand_num, cand_den
        if not found or in_num * best_den < best_num * in_den:
            best_num, best_den, found = in_num, in_den, True
    if not found:
        return MeanCycleResult(mu=None, certificate=None)
    mu = Fraction(best_num, best_den * arc.den)

    shifted = arc.shifted(mu)
    tables = kernels.karp_tables(shifted)
    D2 = tables.D
    vstar = -1
    for v in range(n):
        dn = D2[n][v]
        if dn is None:
            continue
        if all(dm is None or dn <= dm for dm in (D2[m][v] for m in range(n))):
            vstar = v
            break
    assert vstar >= 0, "shifted tables lost the optimal vertex"

    walk = [0] * (n + 1)
    walk[n] = vstar
    for m in range(n, 0, -1):
        walk[m - 1] = tables.pred(m, walk[m])
    seen: dict[int, int] = {}
    cycle: list[int] = []
    for i in range(n, -1, -1):
        v = walk[i]
        if v in seen:
            cycle = walk[i + 1 : seen[v] + 1]
            break
        seen[v] = i
    assert cycle, "an (n+1)-vertex walk must repeat a vertex"

    cert = _certificate(arc, cycle, graph)
    assert cert.mean_length == mu, "certificate mean disagrees with the table value"
    return MeanCycleResult(mu=mu, certificate=cert)


def worst_bounded_cycle(g: GraphLike, k: int) -> BoundedCycleReport:
    """Minimum-mean cycle among simple cycles of cardinality ≤ k+1.

    Fills walk tables up to k+1 arcs and minimizes closed-walk mean; an
    optimal closed walk decomposes into simple cycles that all share its
    mean, so the first cycle completed along the walk is returned.
    """
    if k < 1:
        raise ValueError(f"k must be >= 1, got {k}")
    arc, graph = _split(g)
    n = arc.n
    kmax = min(k + 1, n)
    if kmax < 1:
        return BoundedCycleReport(k=k, worst=None)
    tables = kernels.closed_walk_tables(arc, kmax)

    best_val = best_m = best_u = 0
    found = False
    for m in range(1, kmax + 1):
        closed = tables.closed(m)
        for u in range(n):
            val = closed[u]
            if val is None:
                continue
            if not found or val * best_m < best_val * m:
                best_val, best_m, best_u, found = val, m, u, True
    if not found:
        return BoundedCycleReport(k=k, worst=None)

    walk = [0] * (best_m + 1)
    walk[best_m] = best_u
    for m in range(best_m, 0, -1):
        walk[m - 1] = tables.pred(m, best_u, walk[m])
    assert walk[0] == best_u, "closed walk failed to close"
    pos: dict[int, int] = {}
    cycle: list[int] = []
    for i, v in enumerate(walk):
        if v in pos:
            cycle = walk[pos[v] : i]
            break
        pos[v] = i
    assert cycle, "a closed walk must complete a cycle"

    cert = _certificate(arc, cycle, graph)
    assert cert.mean_length == Fraction(best_val, best_m * arc.den), (
        "excised cycle mean disagrees with the walk mean"
    )
    return BoundedCycleReport(k=k, worst=cert)


def tight_bound_fixture(k: int, lmax: Fraction, n: int) -> ArcLengths:
    """Complete digraph showing the k-bounded check's blind spot exactly.

    One distinguished cycle on vertices ``0..k+1`` has every arc at
    ``-lmax/k``; every other arc is ``+lmax``.  Every cycle of
    cardinality ≤ k+1 then has non-negative total, yet the minimum cycle
    mean is ``-lmax/k`` — the extreme value an adversary can hide from a
    cardinality-bounded rule with arc lengths capped at ``lmax``.
    """
    lmax = Fraction(lmax)
    if k < 1:
        raise ValueError(f"k must be >= 1, got {k}")
    if lmax <= 0:
        raise ValueError(f"lmax must be positive, got {lmax}")
    if n < k + 3:
        raise ValueError(f"need n >= k+3 = {k + 3} vertices, got {n}")
    ring = k + 2
    inside = -lmax / k
    matrix: list[list[Fraction | None]] = [
        [None if u == w else lmax for w in range(n)] for u in range(n)
    ]
    for i in range(ring):
        matrix[i][(i + 1) % ring] = inside
    return ArcLengths.from_fractions(n, matrix)


def simple_cycles(
    arc: ArcLengths, max_cardinality: int | None = None
) -> Iterator[tuple[tuple[int, ...], Fraction]]:
    """Yield every simple cycle as (vertices, total length), lazily.

    Each cycle appears once, rooted at its smallest vertex id; roots
    ascend and the search under a root explores smaller next-vertices
    first, so the order is deterministic.
    """
    n = arc.n
    num = arc.num
    cap = n if max_cardinality is None else min(max_cardinality, n)
    if cap < 1:
        return
    path: list[int] = []
    on_path: set[int] = set()

    def extend(start: int, u: int, total: int) -> Iterator[tuple[tuple[int, ...], Fraction]]:
        row = num[u]
        for w in range(start, n):
            cell = row[w]
            if cell is None:
                continue
            if w == start:
                yield tuple(path), Fraction(total + cell, arc.den)
            elif w not in on_path and len(path) < cap:
                path.append(w)
                on_path.add(w)
                yield from extend(start, w, total + cell)
                on_path.discard(w)
                path.pop()

    for start in range(n):
        path = [start]
        on_path = {start}
        yield from extend(start, start, 0)
