"""Domain types and bidding-graph construction.

An auction session is a stream of observations ``(t, p_t, x_t)``: at round
``t`` the bidder faced item prices ``p_t`` and bid for the bundle ``x_t``.
Quasilinear rationality relates any two observed bundles: choosing ``u``
at prices ``p`` reveals ``v(w) <= v(u) + p . (w - u)`` for every bundle
``w``.  The bidding graph packages these constraints: one vertex per
distinct bid bundle, and for every ordered vertex pair ``(u, w)`` an arc
whose length is the tightest such bound,

    length(u, w) = min over rounds t bidding u of  p_t . (w - u).

Bundles never bid have no outgoing constraints and can join no cycle, so
the graph is restricted to observed bundles.  All arithmetic is exact
rational; arc lengths are additionally held as integers over one common
denominator so that cycle searches run on machine integers.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property
from math import lcm
from typing import Iterator, Mapping, Sequence

from .errors import (
    DimensionMismatch,
    DuplicateRound,
    NegativeValue,
    StaleRound,
    UnknownRound,
)
from .rational import wire_string

Vector = tuple[Fraction, ...]


def dot(p: Vector, x: Vector) -> Fraction:
    """Exact inner product of two equal-length rational vectors."""
    return sum((a * b for a, b in zip(p, x)), start=Fraction(0))


def _as_vector(values: Sequence[Fraction], what: str) -> Vector:
    vec = tuple(Fraction(v) for v in values)
    for v in vec:
        if v < 0:
            raise NegativeValue(f"{what} contains a negative entry: {v}")
    return vec


@dataclass(frozen=True)
class Observation:
    """One auction round: round id, price vector, chosen bundle.

    Attributes:
        t: round id, a positive integer, unique within a session.
        prices: per-item prices, all >= 0.
        bundle: per-item quantities bid for, all >= 0.
    """

    t: int
    prices: Vector
    bundle: Vector

    def __post_init__(self) -> None:
        if not isinstance(self.t, int) or isinstance(self.t, bool) or self.t < 1:
            raise ValueError(f"round id must be a positive integer, got {self.t!r}")
        object.__setattr__(self, "prices", _as_vector(self.prices, f"round {self.t} prices"))
        object.__setattr__(self, "bundle", _as_vector(self.bundle, f"round {self.t} bundle"))
        if not self.prices:
            raise ValueError(f"round {self.t}: price and quantity vectors are empty")
        if len(self.prices) != len(self.bundle):
            raise DimensionMismatch(
                f"round {self.t}: {len(self.prices)} prices vs {len(self.bundle)} quantities"
            )

    @property
    def dimension(self) -> int:
        return len(self.prices)

    @property
    def cost(self) -> Fraction:
        """Money spent this round, ``p_t . x_t``."""
        return dot(self.prices, self.bundle)


class BundleInterner:
    """Assigns dense vertex ids to distinct quantity vectors.

    Equal vectors (componentwise, exact) share one id; ids count up from 0
    in first-appearance order.  The session dimension is fixed by the
    first vector interned.
    """

    def __init__(self, dimension: int | None = None):
        self._dimension = dimension
        self._ids: dict[Vector, int] = {}
        self._vectors: list[Vector] = []

    @property
    def dimension(self) -> int | None:
        return self._dimension

    @property
    def vectors(self) -> tuple[Vector, ...]:
        return tuple(self._vectors)

    def __len__(self) -> int:
        return len(self._vectors)

    def intern(self, vec: Sequence[Fraction]) -> int:
        v = tuple(Fraction(q) for q in vec)
        if self._dimension is None:
            self._dimension = len(v)
        elif len(v) != self._dimension:
            raise DimensionMismatch(
                f"bundle has {len(v)} items, session dimension is {self._dimension}"
            )
        got = self._ids.get(v)
        if got is not None:
            return got
        idx = len(self._vectors)
        self._ids[v] = idx
        self._vectors.append(v)
        return idx


class ArcLengths:
    """Exact arc lengths of a digraph on vertices ``0..n-1``.

    Lengths are stored as integers over one shared positive denominator,
    which is the form the cycle kernels consume.  ``None`` marks an absent
    arc (the diagonal always, plus any arcs deleted by relaxation
    analyses).
    """

    __slots__ = ("n", "den", "num")

    def __init__(self, n: int, den: int, num: tuple[tuple[int | None, ...], ...]):
        self.n = n
        self.den = den
        self.num = num

    @classmethod
    def from_fractions(
        cls, n: int, entries: Sequence[Sequence[Fraction | None]]
    ) -> "ArcLengths":
        """Build from an ``n x n`` matrix of Fractions (None = no arc)."""
        den = 1
        for row in entries:
            for v in row:
                if v is not None:
                    den = lcm(den, v.denominator)
        num = tuple(
            tuple(
                None if v is None else v.numerator * (den // v.denominator)
                for v in row
            )
            for row in entries
        )
        return cls(n, den, num)

    def __eq__(self, other: object) -> bool:
        """Value equality: same vertex count and the same rational length
        (or absence) on every arc, regardless of the stored denominator."""
        if not isinstance(other, ArcLengths):
            return NotImplemented
        if self.n != other.n:
            return False
        if self.den == other.den:
            return self.num == other.num
        for mine, theirs in zip(self.num, other.num):
            for a, b in zip(mine, theirs):
                if a is None or b is None:
                    if a is not b:
                        return False
                elif a * other.den != b * self.den:
                    return False
        return True

    def __hash__(self) -> int:
        return hash(
            (
                self.n,
                tuple(
                    tuple(
                        None if cell is None else Fraction(cell, self.den)
                        for cell in row
                    )
                    for row in self.num
                ),
            )
        )

    def length(self, u: int, w: int) -> Fraction | None:
        cell = self.num[u][w]
        return None if cell is None else Fraction(cell, self.den)

    def arcs(self) -> Iterator[tuple[int, int, Fraction]]:
        """All arcs ``(u, w, length)`` in ascending (u, w) order."""
        for u in range(self.n):
            row = self.num[u]
            for w in range(self.n):
                cell = row[w]
                if cell is not None:
                    yield u, w, Fraction(cell, self.den)

    @property
    def arc_count(self) -> int:
        return sum(1 for row in self.num for cell in row if cell is not None)

    def max_abs_length(self) -> Fraction:
        """Largest absolute arc length; 0 for an arcless graph."""
        worst = 0
        for row in self.num:
            for cell in row:
                if cell is not None and abs(cell) > worst:
                    worst = abs(cell)
        return Fraction(worst, self.den)

    def shifted(self, mu: Fraction) -> "ArcLengths":
        """Subtract ``mu`` from every arc length."""
        den = lcm(self.den, mu.denominator)
        a = den // self.den
        b = mu.numerator * (den // mu.denominator)
        num = tuple(
            tuple(None if cell is None else cell * a - b for cell in row)
            for row in self.num
        )
        return ArcLengths(self.n, den, num)

    def rescaled(self, den: int) -> "ArcLengths":
        """Re-express over a larger common denominator (a multiple of den)."""
        if den == self.den:
            return self
        if den % self.den:
            raise ValueError(f"{den} is not a multiple of {self.den}")
        mult = den // self.den
        num = tuple(
            tuple(None if cell is None else cell * mult for cell in row)
            for row in self.num
        )
        return ArcLengths(self.n, den, num)

    def transposed(self) -> "ArcLengths":
        num = tuple(
            tuple(self.num[w][u] for w in range(self.n)) for u in range(self.n)
        )
        return ArcLengths(self.n, self.den, num)

    def without_vertices(self, drop: frozenset[int] | set[int]) -> "ArcLengths":
        """Delete all arcs incident to the given vertices (ids keep their place)."""
        num = tuple(
            tuple(
                None if (u in drop or w in drop) else cell
                for w, cell in enumerate(row)
            )
            for u, row in enumerate(self.num)
        )
        return ArcLengths(self.n, self.den, num)

    def without_arcs(self, remove: set[tuple[int, int]]) -> "ArcLengths":
        num = tuple(
            tuple(
                None if (u, w) in remove else cell for w, cell in enumerate(row)
            )
            for u, row in enumerate(self.num)
        )
        return ArcLengths(self.n, self.den, num)


@dataclass(frozen=True)
class CycleCertificate:
    """A simple cycle witnessing a mean-length value.

    ``vertices`` lists distinct bundle ids in arc order, rotated so the
    smallest id comes first; arc ``i`` runs ``vertices[i] ->
    vertices[(i+1) % len]``.  ``witness_rounds`` gives, per arc, the round
    id whose prices attain that arc's length (None when the cycle comes
    from a raw length matrix with no round provenance).
    """

    vertices: tuple[int, ...]
    total_length: Fraction
    mean_length: Fraction
    witness_rounds: tuple[int, ...] | None = None

    def __post_init__(self) -> None:
        if len(set(self.vertices)) != len(self.vertices):
            raise ValueError("certificate cycle must be simple")
        if self.mean_length * len(self.vertices) != self.total_length:
            raise ValueError("certificate mean does not match its total")

    @property
    def cardinality(self) -> int:
        return len(self.vertices)

    def arcs(self) -> Iterator[tuple[int, int]]:
        k = len(self.vertices)
        for i in range(k):
            yield self.vertices[i], self.vertices[(i + 1) % k]

    def to_wire(self) -> dict:
        out: dict = {
            "vertices": list(self.vertices),
            "total": wire_string(self.total_length),
            "mean": wire_string(self.mean_length),
        }
        if self.witness_rounds is not None:
            out["witness_rounds"] = list(self.witness_rounds)
        return out


@dataclass(frozen=True)
class BiddingGraph:
    """Complete digraph on the distinct bundles of an observation stream.

    Attributes:
        dimension: item count, fixed per session.
        observations: the rounds, ascending by round id.
        bundles: vertex id -> quantity vector, dense first-appearance ids.
        lengths: exact arc lengths (complete; diagonal absent).
        witness: ``witness[u][w]`` is the earliest round id attaining
            ``length(u, w)``.
    """

    dimension: int
    observations: tuple[Observation, ...]
    bundles: tuple[Vector, ...]
    lengths: ArcLengths
    witness: tuple[tuple[int | None, ...], ...]

    @property
    def n_vertices(self) -> int:
        return len(self.bundles)

    @cached_property
    def vertex_of(self) -> Mapping[Vector, int]:
        return {b: i for i, b in enumerate(self.bundles)}

    @cached_property
    def observation_by_round(self) -> Mapping[int, Observation]:
        return {o.t: o for o in self.observations}

    @cached_property
    def rounds_at(self) -> tuple[tuple[Observation, ...], ...]:
        """Observations grouped by bundle vertex, ascending round id."""
        groups: list[list[Observation]] = [[] for _ in self.bundles]
        for o in self.observations:
            groups[self.vertex_of[o.bundle]].append(o)
        return tuple(tuple(g) for g in groups)

    @cached_property
    def own_cost(self) -> tuple[Fraction, ...]:
        """Per vertex, the largest money spent on it: max over its rounds of p_t . x_t."""
        return tuple(max(o.cost for o in group) for group in self.rounds_at)

    @property
    def b_max(self) -> Fraction:
        """Largest bid value in the session, max over rounds of p_t . x_t."""
        return max(o.cost for o in self.observations)

    @property
    def l_max(self) -> Fraction:
        """Largest absolute arc length (0 when fewer than two vertices)."""
        return self.lengths.max_abs_length()

    def arc_witness(self, u: int, w: int) -> int | None:
        return self.witness[u][w]

    def with_observation(self, obs: Observation) -> "BiddingGraph":
        """Return the graph extended by one later round.

        Only arcs incident to the new round's bundle vertex can change;
        everything else is shared with this graph.
        """
        if obs.dimension != self.dimension:
            raise DimensionMismatch(
                f"round {obs.t} has {obs.dimension} items, session has {self.dimension}"
            )
        if obs.t <= self.observations[-1].t:
            raise StaleRound(
                f"round id {obs.t} does not exceed last committed round {self.observations[-1].t}"
            )
        observations = self.observations + (obs,)
        known = self.vertex_of.get(obs.bundle)
        den = self.lengths.den
        num = [list(row) for row in self.lengths.num]
        wit = [list(row) for row in self.witness]

        if known is None:
            u = len(self.bundles)
            bundles = self.bundles + (obs.bundle,)
            for row in num:
                row.append(None)
            num.append([None] * (u + 1))
            for row in wit:
                row.append(None)
            wit.append([None] * (u + 1))
            new_arcs: list[tuple[int, int, Fraction, int]] = []
            for w, target in enumerate(self.bundles):
                new_arcs.append((u, w, dot(obs.prices, target) - obs.cost, obs.t))
            for w, group in enumerate(self.rounds_at):
                best: Fraction | None = None
                best_t = None
                for o in group:
                    cand = dot(o.prices, obs.bundle) - o.cost
                    if best is None or cand < best:
                        best, best_t = cand, o.t
                new_arcs.append((w, u, best, best_t))  # type: ignore[arg-type]
        else:
            u = known
            bundles = self.bundles
            new_arcs = []
            for w, target in enumerate(self.bundles):
                if w == u:
                    continue
                cand = dot(obs.prices, target) - obs.cost
                old = self.lengths.length(u, w)
                if old is None or cand < old:
                    new_arcs.append((u, w, cand, obs.t))

        new_den = den
        for _, _, value, _ in new_arcs:
            new_den = lcm(new_den, value.denominator)
        if new_den != den:
            mult = new_den // den
            den = new_den
            num = [
                [None if cell is None else cell * mult for cell in row] for row in num
            ]
        for a, b, value, t in new_arcs:
            num[a][b] = value.numerator * (den // value.denominator)
            wit[a][b] = t

        return BiddingGraph(
            dimension=self.dimension,
            observations=observations,
            bundles=bundles,
            lengths=ArcLengths(len(bundles), den, tuple(tuple(r) for r in num)),
            witness=tuple(tuple(r) for r in wit),
        )

    def without_rounds(self, round_ids: Sequence[int]) -> "BiddingGraph | None":
        """Rebuild on the surviving observations; None if nothing survives.

        A bundle vertex disappears only when all of its rounds are
        withdrawn; otherwise its arcs are recomputed over the remaining
        rounds (the minima can only weaken).
        """
        drop = set(round_ids)
        unknown = drop - set(self.observation_by_round)
        if unknown:
            raise UnknownRound(f"unknown round ids: {sorted(unknown)}")
        survivors = [o for o in self.observations if o.t not in drop]
        if not survivors:
            return None
        return build_bidding_graph(survivors)


def build_bidding_graph(observations: Sequence[Observation]) -> BiddingGraph:
    """Build the bidding graph for a full observation stream.

    Deterministic given the set of rounds: observations are ordered by
    round id, vertex ids follow first appearance in that order, and ties
    in the arc minima resolve to the earliest round.
    """
    if not observations:
        raise ValueError("at least one observation is required")
    ordered = sorted(observations, key=lambda o: o.t)
    for a, b in zip(ordered, ordered[1:]):
        if a.t == b.t:
            raise DuplicateRound(f"round id {a.t} appears more than once")
    dimension = ordered[0].dimension
    interner = BundleInterner(dimension)
    for o in ordered:
        if o.dimension != dimension:
            raise DimensionMismatch(
                f"round {o.t} has {o.dimension} items, session has {dimension}"
            )
        interner.intern(o.bundle)
    bundles = interner.vectors
    n = len(bundles)
    groups: list[list[Observation]] = [[] for _ in range(n)]
    for o in ordered:
        groups[interner.intern(o.bundle)].append(o)

    lengths: list[list[Fraction | None]] = [[None] * n for _ in range(n)]
    witness: list[list[int | None]] = [[None] * n for _ in range(n)]
    for u in range(n):
        for o in groups[u]:
            own = o.cost
            for w in range(n):
                if w == u:
                    continue
                cand = dot(o.prices, bundles[w]) - own
                cur = lengths[u][w]
                if cur is None or cand < cur:
                    lengths[u][w] = cand
                    witness[u][w] = o.t

    return BiddingGraph(
        dimension=dimension,
        observations=tuple(ordered),
        bundles=bundles,
        lengths=ArcLengths.from_fractions(n, lengths),
        witness=tuple(tuple(row) for row in witness),
    )
