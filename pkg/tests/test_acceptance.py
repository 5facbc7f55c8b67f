"""Acceptance gate: one test per required guarantee, at desk scale.

Each test restates an externally pinned requirement with its exact
corpus sizes and tolerances; run with ``-v`` for one pass/fail line per
guarantee.  Oracles live in oracles.py and share nothing with the
implementation under test.
"""

import hashlib
import json
import random
import time
from fractions import Fraction

from fastapi.testclient import TestClient

import oracles
from conftest import random_history, random_matrix, raw_triples
from revpref.core import ArcLengths, Observation, build_bidding_graph
from revpref.cycles import min_mean_cycle, tight_bound_fixture, worst_bounded_cycle
from revpref.kernels import shortest_from
from revpref.rules import RuleConfig, afriat_lambda, history_verdict, validate_bid
from revpref.service import create_app
from revpref.valuation import (
    UpperBounds,
    max_valuation,
    min_ir_valuation,
    shifted_graph,
)

CORPUS_SEED = 20260814
CORPUS_SIZE = 1000


def length_corpus():
    """The shared digraph corpus: complete, 3-8 vertices, integer lengths
    in [-10, 10], fixed seed, 1000 graphs."""
    rng = random.Random(CORPUS_SEED)
    return [random_matrix(rng, rng.randint(3, 8)) for _ in range(CORPUS_SIZE)]


def test_min_mean_cycle_matches_exhaustive_enumeration_on_1000_graphs():
    """Exact rational equality with brute-force simple-cycle enumeration
    on every corpus graph, inside a 60 s budget."""
    started = time.perf_counter()
    for matrix in length_corpus():
        arc = ArcLengths.from_fractions(len(matrix), matrix)
        result = min_mean_cycle(arc)
        assert result.mu == oracles.brute_min_mean(matrix)
        cycle = result.certificate.vertices
        recomputed = sum(
            matrix[u][w] for u, w in zip(cycle, cycle[1:] + cycle[:1])
        )
        assert recomputed == result.certificate.total_length
        assert result.certificate.mean_length == result.mu
    assert time.perf_counter() - started < 60


def test_root_distance_valuation_is_tight_at_negated_worst_mean():
    """On the corpus read as bidding graphs: shortest-path values off a
    root satisfy every arc constraint at slack -mu exactly, and summing
    the certificate cycle's constraints proves no smaller slack exists."""
    for matrix in length_corpus():
        arc = ArcLengths.from_fractions(len(matrix), matrix)
        result = min_mean_cycle(arc)
        mu = result.mu
        shifted = shifted_graph(arc, mu)
        seeds = [None] * arc.n
        seeds[0] = 0
        dist = shortest_from(shifted, seeds)
        assert all(d is not None for d in dist)
        values = [Fraction(d, shifted.den) for d in dist]
        for u, w, length in arc.arcs():
            assert values[w] - values[u] <= length - mu
        # tightness: around this cycle the constraints sum to
        # 0 <= total + len * eps, so every valuation needs eps >= -mu
        cycle = result.certificate.vertices
        total = sum(matrix[u][w] for u, w in zip(cycle, cycle[1:] + cycle[:1]))
        assert total == len(cycle) * mu


def test_min_ir_valuation_is_coordinatewise_least_and_rigid():
    """Matches the independent constraint-propagation oracle exactly on
    200+ short histories; lowering any single coordinate by 1/1000 or by
    1 breaks feasibility."""
    rng = random.Random(99)
    compared = 0
    for _ in range(220):
        observations = random_history(rng, rng.randint(1, 6), rng.choice([2, 3]))
        g = build_bidding_graph(observations)
        fitted = min_ir_valuation(g)
        triples = raw_triples(observations)
        expected = oracles.least_valuation(triples, fitted.epsilon)
        assert expected is not None
        assert [fitted.values[u] for u in range(g.n_vertices)] == expected
        assignment = {g.bundles[u]: q for u, q in fitted.values.items()}
        assert oracles.satisfies_constraints(triples, fitted.epsilon, assignment)
        for delta in (Fraction(1, 1000), Fraction(1)):
            for u in fitted.values:
                lowered = dict(assignment)
                lowered[g.bundles[u]] = fitted.values[u] - delta
                assert not oracles.satisfies_constraints(triples, fitted.epsilon, lowered)
        compared += 1
    assert compared >= 200


def test_max_valuation_is_coordinatewise_greatest_under_bounds():
    """Matches the symmetric lowering oracle on random bound sets; the
    reported IR flag equals direct substitution; setting the bounds to
    the least IR values collapses the envelope (max == min)."""
    rng = random.Random(4242)
    compared = 0
    for _ in range(220):
        observations = random_history(rng, rng.randint(1, 6), rng.choice([2, 3]))
        g = build_bidding_graph(observations)
        ids = list(range(g.n_vertices))
        bounds = {
            u: Fraction(rng.randint(0, 60))
            for u in rng.sample(ids, rng.randint(1, len(ids)))
        }
        fitted = max_valuation(g, UpperBounds(bounds))
        expected = oracles.greatest_valuation(raw_triples(observations), bounds, fitted.epsilon)
        assert expected is not None
        for u in range(g.n_vertices):
            if expected[u] is None:
                assert u in fitted.unbounded
            else:
                assert fitted.values[u] == expected[u]
        by_bundle = {g.bundles[u]: u for u in range(g.n_vertices)}
        substituted_ir = all(
            by_bundle[o.bundle] in fitted.values
            and fitted.values[by_bundle[o.bundle]]
            >= sum(p * q for p, q in zip(o.prices, o.bundle))
            for o in observations
        )
        assert fitted.individually_rational == substituted_ir

        least = min_ir_valuation(g)
        collapsed = max_valuation(g, UpperBounds(dict(least.values)))
        assert dict(collapsed.values) == dict(least.values)
        compared += 1
    assert compared >= 200


def test_acceptance_threshold_and_valuation_existence_coincide():
    """On 500+ random histories: unbounded-rule acceptance at slack eps,
    mu >= -eps, and existence of an eps-consistent IR valuation are the
    same event; when they hold, the fitted valuation passes substitution."""
    rng = random.Random(31337)
    checked = 0
    for _ in range(520):
        observations = random_history(rng, rng.randint(2, 8), 2)
        epsilon = Fraction(rng.choice([0, 1, 2, 5]))
        g = build_bidding_graph(observations)
        accepted = history_verdict(g, RuleConfig(rule="garp", epsilon=epsilon)).accepted
        mu = min_mean_cycle(g).mu
        fitted = min_ir_valuation(g)
        assert accepted == (mu is None or mu >= -epsilon) == (fitted.epsilon <= epsilon)
        if accepted:
            assignment = {g.bundles[u]: q for u, q in fitted.values.items()}
            assert oracles.satisfies_constraints(raw_triples(observations), epsilon, assignment)
        checked += 1
    assert checked >= 500


def test_short_cycle_consistency_bounds_the_global_mean():
    """Graphs whose cycles through <= k+1 vertices are all non-negative
    have mu >= -lmax/k for k in {1,2,3}; the ring fixture attains the
    bound with equality for lmax in {1, 2, 7/2}."""
    rng = random.Random(777)
    conditioned = {1: 0, 2: 0, 3: 0}
    for _ in range(4000):
        matrix = random_matrix(rng, rng.randint(3, 6), low=-1, high=10)
        arc = ArcLengths.from_fractions(len(matrix), matrix)
        mu = min_mean_cycle(arc).mu
        lmax = arc.max_abs_length()
        for k in (1, 2, 3):
            short = worst_bounded_cycle(arc, k).worst
            if short is not None and short.mean_length < 0:
                continue
            conditioned[k] += 1
            assert mu >= -lmax / k
    assert all(count >= 50 for count in conditioned.values()), conditioned

    for k, lmax in ((1, Fraction(1)), (2, Fraction(2)), (3, Fraction(7, 2))):
        fixture = tight_bound_fixture(k, lmax, n=k + 3)
        assert min_mean_cycle(fixture).mu == -lmax / k
        short = worst_bounded_cycle(fixture, k).worst
        assert short is None or short.mean_length >= 0


def test_bounded_rule_passing_histories_have_bounded_fitted_slack():
    """On 200+ histories passing the (k+1)-bounded rule at slack eps, the
    fitted optimal slack stays within b_max/k + eps."""
    rng = random.Random(1848)
    passing = 0
    attempts = 0
    while passing < 200 and attempts < 4000:
        attempts += 1
        k = rng.choice([1, 2, 3])
        epsilon = Fraction(rng.choice([0, 1, 3]))
        observations = random_history(rng, rng.randint(2, 7), 2)
        g = build_bidding_graph(observations)
        if not history_verdict(g, RuleConfig(rule="karp", k=k, epsilon=epsilon)).accepted:
            continue
        passing += 1
        assert min_ir_valuation(g).epsilon <= g.b_max / k + epsilon
    assert passing >= 200


def test_pairwise_and_bounded_rules_match_direct_inequalities():
    """Graph verdicts of the 2-bundle and (k+1)-bundle rules equal direct
    evaluation of the defining inequalities over every ordered round
    tuple, exhaustively, for histories of up to 6 rounds."""
    rng = random.Random(60609)
    for _ in range(120):
        observations = random_history(rng, rng.randint(2, 6), 2)
        g = build_bidding_graph(observations)
        epsilon = Fraction(rng.choice([0, 1, 2]))
        triples = raw_triples(observations)
        warp = history_verdict(g, RuleConfig(rule="warp", epsilon=epsilon))
        assert warp.accepted == (oracles.direct_rule_violation(triples, 2, epsilon) is None)
        for k in (1, 2, 3, 4):
            karp = history_verdict(g, RuleConfig(rule="karp", k=k, epsilon=epsilon))
            direct = oracles.direct_rule_violation(triples, k + 1, epsilon)
            assert karp.accepted == (direct is None)


def test_arc_relaxation_finds_the_known_critical_level():
    """On a constructed instance with a single finite critical arc the
    relaxation sweep returns the hand-derived level exactly, and the
    residual graph's recomputed worst mean respects the target slack."""
    # Three unit bundles A, B, C.  Every forward arc of the triangle
    # undercuts by exactly 1 (worst mean -1, violating at slack 0), the
    # reverse arcs are +5, and the fitted valuation is (7, 7, 7): the
    # lone arc with a critical level strictly inside (0, 1) is B -> A at
    # (7 - 6) / (7 - 1) = 1/6.
    observations = [
        Observation(1, ("7", "6", "12"), ("1", "0", "0")),
        Observation(2, ("6", "1", "0"), ("0", "1", "0")),
        Observation(3, ("6", "12", "7"), ("0", "0", "1")),
    ]
    g = build_bidding_graph(observations)
    epsilon = Fraction(0)
    result = afriat_lambda(g, epsilon)
    assert result.lambda_star == Fraction(1)
    assert result.critical_values == (Fraction(1, 6), Fraction(1))
    assert result.removed_arcs == (
        (0, 1, None),
        (1, 2, Fraction(7, 6)),
        (2, 0, None),
    )
    survivors = g.lengths.without_arcs({(u, w) for u, w, _ in result.removed_arcs})
    residual = min_mean_cycle(survivors).mu
    assert result.residual_mu == residual == Fraction(5)
    assert residual >= -epsilon

    # degenerate companion: at slack 0 the whole digon is removed and the
    # residual has no cycles left at all
    digon = build_bidding_graph(
        [
            Observation(1, ("2", "1"), ("1", "0")),
            Observation(2, ("1", "2"), ("0", "1")),
        ]
    )
    result = afriat_lambda(digon, Fraction(0))
    assert result.lambda_star == Fraction(1)
    assert {(u, w) for u, w, _ in result.removed_arcs} == {(0, 1), (1, 0)}
    assert result.residual_mu is None
    assert min_mean_cycle(digon.lengths.without_arcs({(0, 1), (1, 0)})).mu is None


def test_online_validation_meets_latency_budgets():
    """One bid check against a 200-round history finishes in <1s under
    the unbounded rule and <100ms under the 3-bounded rule, on both the
    accepted path and the rejected path (which computes advice)."""
    rng = random.Random(7)
    observations = random_history(rng, rounds=200, dimension=3)
    g = build_bidding_graph(observations[:-1])
    candidate = observations[-1]
    for rule, extra, budget in [("garp", {}, 1.0), ("karp", {"k": 3}, 0.1)]:
        for epsilon in (Fraction(0), Fraction(10**6)):
            cfg = RuleConfig(rule=rule, epsilon=epsilon, **extra)
            started = time.perf_counter()
            validate_bid(observations[:-1], candidate, cfg, base_graph=g)
            elapsed = time.perf_counter() - started
            assert elapsed < budget, (rule, str(epsilon), elapsed)


def test_service_replays_1000_event_scripts_deterministically():
    """The same 1000-event commit/whatif/withdraw script produces
    byte-identical transcripts and final analyses on two independent
    service instances, and no whatif ever changes observable state."""

    def wire_bid(rng, t):
        return {
            "t": t,
            "p": [str(rng.randint(0, 9)) for _ in range(2)],
            "x": [str(rng.randint(0, 4)) for _ in range(2)],
        }

    def event_script(rng):
        events = []
        t = 0
        submitted = []
        for _ in range(1000):
            roll = rng.random()
            if roll < 0.40:
                t += 1
                events.append(("commit", wire_bid(rng, t)))
                submitted.append(t)
            elif roll < 0.80:
                events.append(("whatif", wire_bid(rng, t + 1)))
            elif submitted:
                victim = rng.choice(submitted)
                submitted.remove(victim)
                events.append(("withdraw", victim))
        return events

    def state_fingerprint(store, sid):
        graph = store.get(sid).graph
        payload = repr(
            ()
            if graph is None
            else (graph.observations, graph.bundles, graph.lengths.den, graph.lengths.num)
        )
        return hashlib.sha256(payload.encode()).hexdigest()

    def run(events):
        client = TestClient(create_app())
        sid = client.post(
            "/sessions", json={"dimension": 2, "rule": {"rule": "garp", "epsilon": "2"}}
        ).json()["id"]
        store = client.app.state.store
        committed = set()
        transcript = []
        for kind, payload in events:
            if kind == "commit":
                verdict = client.post(f"/sessions/{sid}/bids", json=payload).json()
                if verdict.get("accepted"):
                    committed.add(payload["t"])
                transcript.append(verdict)
            elif kind == "whatif":
                before = state_fingerprint(store, sid)
                transcript.append(
                    client.post(f"/sessions/{sid}/whatif", json=payload).json()
                )
                assert state_fingerprint(store, sid) == before
            elif payload in committed:
                committed.discard(payload)
                doc = client.post(
                    f"/sessions/{sid}/withdrawals", json={"rounds": [payload]}
                ).json()
                transcript.append({"after_withdraw_mu": doc["mu"]})
        final = client.get(f"/sessions/{sid}/analysis").json()
        del final["id"]
        return json.dumps(transcript, sort_keys=True), json.dumps(final, sort_keys=True)

    events = event_script(random.Random(112358))
    assert sum(1 for kind, _ in events if kind == "whatif") > 300
    first_transcript, first_final = run(events)
    second_transcript, second_final = run(events)
    assert first_transcript == second_transcript
    assert first_final == second_final
