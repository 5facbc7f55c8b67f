"""Shared fixtures: canonical small histories and random-corpus generators."""

from __future__ import annotations

import random
from fractions import Fraction

import pytest

from revpref.core import Observation, build_bidding_graph


@pytest.fixture
def digon_history() -> list[Observation]:
    """Two rounds whose bundles each undercut the other by 1: the bidding
    graph is a single digon with both arcs -1 (worst mean -1)."""
    return [
        Observation(1, ("2", "1"), ("1", "0")),
        Observation(2, ("1", "2"), ("0", "1")),
    ]


@pytest.fixture
def digon_graph(digon_history):
    return build_bidding_graph(digon_history)


@pytest.fixture
def single_round_history() -> list[Observation]:
    return [Observation(1, ("3", "1"), ("2", "0"))]


def random_matrix(rng: random.Random, n: int, low: int = -10, high: int = 10):
    """Complete digraph on n vertices with integer lengths in [low, high]."""
    return [
        [None if u == w else Fraction(rng.randint(low, high)) for w in range(n)]
        for u in range(n)
    ]


def random_history(
    rng: random.Random,
    rounds: int,
    dimension: int,
    price_high: int = 9,
    quantity_high: int = 4,
) -> list[Observation]:
    """Random bid history with small integer prices and bundles."""
    observations = []
    for t in range(1, rounds + 1):
        prices = tuple(str(rng.randint(0, price_high)) for _ in range(dimension))
        bundle = tuple(str(rng.randint(0, quantity_high)) for _ in range(dimension))
        observations.append(Observation(t, prices, bundle))
    return observations


def raw_triples(observations) -> list[tuple[int, tuple, tuple]]:
    """Strip Observations down to the plain triples the oracles consume."""
    return [(o.t, o.prices, o.bundle) for o in observations]


def lengths_as_matrix(graph) -> list[list[Fraction | None]]:
    """Arc lengths of a bidding graph as a plain Fraction matrix."""
    arc = graph.lengths
    if arc is None:
        return []
    return [
        [arc.length(u, w) for w in range(arc.n)]
        for u in range(arc.n)
    ]
