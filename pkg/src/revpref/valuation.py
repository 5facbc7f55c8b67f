"""Virtual valuation construction from bidding graphs.

A valuation ``v`` over the observed bundles explains the bids up to slack
``epsilon`` when, for every round ``t`` and observed bundle ``y``,

    v(x_t) - p_t . x_t  >=  v(y) - p_t . y - epsilon,

i.e. the chosen bundle was within ``epsilon`` of the best available
utility.  The smallest achievable slack is the negated minimum cycle
mean, and at that slack three canonical valuations exist: an anchored
one (value 0 at a root bundle), the componentwise-minimal individually
rational one, and the componentwise-maximal one under caps at chosen
bundles.  All three are shortest-path constructions over the arc lengths
shifted down by the minimum cycle mean.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from fractions import Fraction
from math import lcm
from typing import Mapping, Sequence

from . import kernels
from .core import ArcLengths, BiddingGraph
from .cycles import min_mean_cycle
from .errors import MalformedInput
from .rational import RationalParseError, parse_rational, wire_string


@dataclass(frozen=True)
class Valuation:
    """A virtual valuation over observed bundles.

    Attributes:
        values: bundle vertex id -> value, for every bounded coordinate.
        epsilon: the slack the valuation is guaranteed to satisfy
            (negative slack means strict surplus at every constraint).
        individually_rational: whether every round's chosen bundle is
            valued at or above the money spent on it.
        unbounded: vertex ids whose value no constraint caps from above
            (never the case for graphs built from observations; kept for
            bare length matrices).
    """

    values: Mapping[int, Fraction]
    epsilon: Fraction
    individually_rational: bool
    unbounded: tuple[int, ...] = ()


@dataclass(frozen=True)
class UpperBounds:
    """Value caps ``v(x_i) <= entries[i]`` over a subset of observed bundles."""

    entries: Mapping[int, Fraction]

    def __post_init__(self) -> None:
        if not self.entries:
            raise ValueError("at least one bound is required")


def shifted_graph(g: BiddingGraph | ArcLengths, mu: Fraction | None) -> ArcLengths:
    """Arc lengths with ``mu`` subtracted from every arc.

    ``mu`` must be the graph's true minimum cycle mean (None for an
    acyclic graph, shifting by 0), which makes every cycle of the result
    non-negative; both facts are asserted.
    """
    arc = g.lengths if isinstance(g, BiddingGraph) else g
    assert min_mean_cycle(arc).mu == mu, "shift must use the graph's own minimum cycle mean"
    return arc if mu is None else arc.shifted(mu)


def _shift_for(arc: ArcLengths) -> tuple[ArcLengths, Fraction | None]:
    mu = min_mean_cycle(arc).mu
    return (arc if mu is None else arc.shifted(mu)), mu


def _distances(
    shifted: ArcLengths, seeds: Mapping[int, Fraction], reverse: bool = False
) -> list[Fraction | None]:
    """Shortest-walk totals from seeded vertices over shifted lengths.

    ``reverse=True`` measures walks INTO the seeds instead.  None marks
    coordinates no seed reaches.
    """
    den = lcm(shifted.den, *(v.denominator for v in seeds.values()))
    arc = shifted.rescaled(den)
    init: list[int | None] = [None] * arc.n
    for vertex, value in seeds.items():
        init[vertex] = value.numerator * (den // value.denominator)
    matrix = arc.transposed() if reverse else arc
    dist = kernels.shortest_from(matrix, init)
    return [None if d is None else Fraction(d, den) for d in dist]


def anchored_valuation(g: BiddingGraph, root: int = 0) -> Valuation:
    """The valuation of shortest-path distances from a root bundle.

    The root (by default the earliest round's bundle) gets value 0 and
    everything else its shifted-graph distance from it.  Achieves the
    optimal slack, the negated minimum cycle mean; typically not
    individually rational.
    """
    if not 0 <= root < g.n_vertices:
        raise ValueError(f"root must be an observed bundle id, got {root}")
    shifted, mu = _shift_for(g.lengths)
    dist = _distances(shifted, {root: Fraction(0)})
    values = {u: d for u, d in enumerate(dist) if d is not None}
    unbounded = tuple(u for u, d in enumerate(dist) if d is None)
    return Valuation(
        values=values,
        epsilon=-mu if mu is not None else Fraction(0),
        individually_rational=_is_ir(g, values),
        unbounded=unbounded,
    )


def min_ir_valuation(g: BiddingGraph) -> Valuation:
    """The componentwise-minimal individually rational valuation.

    Built from shortest-path distances into a spending sink: every
    bundle gets an exit arc worth the negated money spent on it (largest
    spend across its rounds), and ``v = -distance``.  Any other
    individually rational valuation at the same slack dominates this one
    at every observed bundle.
    """
    shifted, mu = _shift_for(g.lengths)
    seeds = {u: -cost for u, cost in enumerate(g.own_cost)}
    dist = _distances(shifted, seeds, reverse=True)
    values = {u: -d for u, d in enumerate(dist) if d is not None}
    assert len(values) == g.n_vertices, "every bundle has its own exit arc"
    return Valuation(
        values=values,
        epsilon=-mu if mu is not None else Fraction(0),
        individually_rational=True,
    )


def max_valuation(g: BiddingGraph, bounds: UpperBounds) -> Valuation:
    """The componentwise-maximal valuation under upper bounds.

    Built from shortest-path distances out of a source seeded with the
    bounds; achieves the optimal slack.  Individual rationality is not
    guaranteed and is reported as observed.  Coordinates unreachable
    from every bounded bundle have no finite maximum and are listed as
    unbounded (impossible once the graph came from observations).
    """
    for u in bounds.entries:
        if not 0 <= u < g.n_vertices:
            raise ValueError(f"bound on unknown bundle id {u}")
    shifted, mu = _shift_for(g.lengths)
    dist = _distances(shifted, dict(bounds.entries))
    values = {u: d for u, d in enumerate(dist) if d is not None}
    unbounded = tuple(u for u, d in enumerate(dist) if d is None)
    return Valuation(
        values=values,
        epsilon=-mu if mu is not None else Fraction(0),
        individually_rational=_is_ir(g, values),
        unbounded=unbounded,
    )


def _is_ir(g: BiddingGraph, values: Mapping[int, Fraction]) -> bool:
    """Whether every round's chosen bundle is valued at or above its cost."""
    return all(
        u in values and values[u] >= cost for u, cost in enumerate(g.own_cost)
    )


def valuation_to_wire(valuation: Valuation, g: BiddingGraph) -> dict:
    """Render as the export object; bundles ascend by vertex id."""
    out: dict = {
        "epsilon": wire_string(valuation.epsilon),
        "individually_rational": valuation.individually_rational,
        "values": [
            {
                "bundle": [wire_string(q) for q in g.bundles[u]],
                "value": wire_string(valuation.values[u]),
            }
            for u in sorted(valuation.values)
        ],
    }
    if valuation.unbounded:
        out["unbounded"] = [
            [wire_string(q) for q in g.bundles[u]] for u in valuation.unbounded
        ]
    return out


def bounds_from_wire(obj: object, g: BiddingGraph) -> UpperBounds:
    """Parse an upper-bounds document (same shape as the export: a
    ``values`` list of bundle/value pairs; other keys are ignored)."""
    if not isinstance(obj, dict) or not isinstance(obj.get("values"), list):
        raise MalformedInput("bounds: expected an object with a \"values\" array")
    entries: dict[int, Fraction] = {}
    for i, item in enumerate(obj["values"]):
        where = f"bounds entry {i}"
        if not isinstance(item, dict) or "bundle" not in item or "value" not in item:
            raise MalformedInput(f"{where}: expected bundle and value keys")
        raw = item["bundle"]
        if not isinstance(raw, list) or not all(isinstance(q, str) for q in raw):
            raise MalformedInput(f"{where}: bundle must be an array of strings")
        try:
            bundle = tuple(parse_rational(q) for q in raw)
            value = parse_rational(item["value"])
        except RationalParseError as exc:
            raise MalformedInput(f"{where}: {exc}") from exc
        vertex = g.vertex_of.get(bundle)
        if vertex is None:
            raise MalformedInput(f"{where}: bundle {raw} was never bid")
        if vertex in entries:
            raise MalformedInput(f"{where}: duplicate bound for bundle {raw}")
        entries[vertex] = value
    if not entries:
        raise MalformedInput("bounds: at least one bound is required")
    return UpperBounds(entries=entries)


def load_bounds(path: str, g: BiddingGraph) -> UpperBounds:
    try:
        with open(path) as fh:
            obj = json.load(fh)
    except json.JSONDecodeError as exc:
        raise MalformedInput(f"bounds: invalid JSON: {exc.msg}") from exc
    return bounds_from_wire(obj, g)
