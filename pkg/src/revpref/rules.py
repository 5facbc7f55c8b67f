"""Activity-rule enforcement for prospective bids.

Three relaxed rationality rules, all reducible to cycle-mean tests on the
bidding graph extended with the candidate bid:

* WARP — no pair of bids may contradict each other beyond slack: every
  2-cycle must have mean >= -epsilon.
* KARP(k) — the same for every cycle of cardinality at most k+1.
* GARP — the same for every cycle, i.e. the minimum cycle mean itself
  must be >= -epsilon.

Acceptance is closed (a boundary bid is legal).  Rejections carry the
offending cycle and, on request, withdrawal advice: the minimum sets of
bundles whose withdrawal restores the rule.  A separate relaxation sweep
finds the largest per-arc tolerance multiplier under which the history
passes, mirroring the efficiency-index tradition of goodness-of-fit.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

from .core import (
    ArcLengths,
    BiddingGraph,
    CycleCertificate,
    Observation,
    build_bidding_graph,
    dot,
)
from .cycles import min_mean_cycle, worst_bounded_cycle
from .errors import DimensionMismatch, MalformedInput, StaleRound
from .rational import RationalParseError, parse_rational, wire_string
from .valuation import min_ir_valuation

WARP = "warp"
KARP = "karp"
GARP = "garp"

ADVICE_VERIFICATION_CAP = 50


@dataclass(frozen=True)
class RuleConfig:
    """Which rule to enforce and with how much slack.

    ``k`` is required for KARP and forbidden otherwise; WARP behaves as
    KARP with k=1.  ``epsilon`` may change between rounds — it belongs to
    the check, not the session.
    """

    rule: str
    k: int | None = None
    epsilon: Fraction = Fraction(0)

    def __post_init__(self) -> None:
        if self.rule not in (WARP, KARP, GARP):
            raise ValueError(f"unknown rule {self.rule!r}")
        if self.rule == KARP:
            if not isinstance(self.k, int) or self.k < 1:
                raise ValueError(f"karp requires an integer k >= 1, got {self.k!r}")
        elif self.k is not None:
            raise ValueError(f"k applies only to karp, not {self.rule}")
        if self.epsilon < 0:
            raise ValueError(f"epsilon must be >= 0, got {self.epsilon}")

    @property
    def cycle_bound(self) -> int | None:
        """Largest cycle cardinality the rule inspects (None = unbounded)."""
        if self.rule == WARP:
            return 2
        if self.rule == KARP:
            assert self.k is not None
            return self.k + 1
        return None

    def to_wire(self) -> dict:
        out: dict = {"rule": self.rule, "epsilon": wire_string(self.epsilon)}
        if self.rule == KARP:
            out["k"] = self.k
        return out

    @classmethod
    def from_wire(cls, obj: object) -> "RuleConfig":
        if not isinstance(obj, dict):
            raise MalformedInput("rule config: expected an object")
        rule = obj.get("rule")
        if rule not in (WARP, KARP, GARP):
            raise MalformedInput(f"rule config: rule must be one of warp/karp/garp, got {rule!r}")
        k = obj.get("k")
        if k is not None and (isinstance(k, bool) or not isinstance(k, int)):
            raise MalformedInput(f"rule config: k must be an integer, got {k!r}")
        raw_eps = obj.get("epsilon", "0")
        try:
            epsilon = parse_rational(raw_eps)
        except RationalParseError as exc:
            raise MalformedInput(f"rule config: {exc}") from exc
        try:
            return cls(rule=rule, k=k, epsilon=epsilon)
        except ValueError as exc:
            raise MalformedInput(f"rule config: {exc}") from exc


@dataclass(frozen=True)
class WithdrawalAdvice:
    """Minimum-cardinality bundle withdrawals that restore the rule.

    ``sets`` lists every minimum-size set of bundle ids (within the
    budget) whose withdrawal makes the remaining history pass, in
    lexicographic order; empty when no set within budget suffices.  Every
    returned set is re-validated against the actual residual graph, so
    the advice stays sound even when ``complete`` is False (the cycle
    enumeration hit its cap).
    """

    sets: tuple[tuple[int, ...], ...]
    complete: bool


@dataclass(frozen=True)
class RuleVerdict:
    """Outcome of checking one candidate bid.

    ``implied_epsilon`` is the smallest slack at which the rule accepts
    this history, the negated worst relevant mean clamped at zero;
    ``violation`` and ``advice`` are set only on rejection.
    """

    accepted: bool
    violation: CycleCertificate | None
    implied_epsilon: Fraction
    advice: WithdrawalAdvice | None

    def to_wire(self) -> dict:
        out: dict = {
            "accepted": self.accepted,
            "implied_epsilon": wire_string(self.implied_epsilon),
            "violation": None if self.violation is None else self.violation.to_wire(),
        }
        if self.advice is not None:
            out["advice"] = {
                "sets": [list(s) for s in self.advice.sets],
                "complete": self.advice.complete,
            }
        return out


@dataclass(frozen=True)
class AfriatResult:
    """Outcome of the arc-relaxation sweep.

    ``lambda_star`` is the largest multiplier in the candidate set (the
    arcs' critical values in (0, 1], plus 1) at which deleting every arc
    whose critical value is >= lambda_star leaves a graph passing the
    target slack.  ``removed_arcs`` lists those deletions as
    ``(u, w, critical)`` with critical None for arcs removed at every
    level; ``critical_values`` is the full candidate list examined.
    """

    lambda_star: Fraction
    removed_arcs: tuple[tuple[int, int, Fraction | None], ...]
    residual_mu: Fraction | None
    critical_values: tuple[Fraction, ...]


def _worst_relevant_cycle(
    g: BiddingGraph | ArcLengths, cfg: RuleConfig
) -> CycleCertificate | None:
    """The minimum-mean cycle among those the rule inspects, if any."""
    bound = cfg.cycle_bound
    if bound is None:
        return min_mean_cycle(g).certificate
    return worst_bounded_cycle(g, bound - 1).worst


def validate_bid(
    history: Sequence[Observation],
    candidate: Observation,
    cfg: RuleConfig,
    *,
    base_graph: BiddingGraph | None = None,
    advice_budget: int = 2,
) -> RuleVerdict:
    """Check whether a prospective bid keeps the history rule-consistent.

    The candidate's round id must exceed every committed round id.  When
    the caller already holds the history's graph, passing it as
    ``base_graph`` turns the check into an incremental extension instead
    of a rebuild.  Rejections include the violating cycle (with witness
    rounds) and withdrawal advice within ``advice_budget``.
    """
    if base_graph is not None:
        graph = base_graph.with_observation(candidate)
    else:
        if history:
            last = max(o.t for o in history)
            if candidate.t <= last:
                raise StaleRound(
                    f"round id {candidate.t} does not exceed last committed round {last}"
                )
            if candidate.dimension != history[0].dimension:
                raise DimensionMismatch(
                    f"round {candidate.t} has {candidate.dimension} items, "
                    f"session has {history[0].dimension}"
                )
        graph = build_bidding_graph([*history, candidate])

    return history_verdict(graph, cfg, advice_budget=advice_budget)


def history_verdict(
    g: BiddingGraph | None,
    cfg: RuleConfig,
    *,
    advice_budget: int = 2,
) -> RuleVerdict:
    """Apply the rule to a history as it stands, with no candidate bid.

    None (an empty history) is accepted vacuously.  Rejections carry the
    violating cycle and withdrawal advice, exactly as for a rejected bid.
    """
    if g is None:
        return RuleVerdict(
            accepted=True, violation=None, implied_epsilon=Fraction(0), advice=None
        )
    worst = _worst_relevant_cycle(g, cfg)
    if worst is None or worst.mean_length >= -cfg.epsilon:
        return RuleVerdict(
            accepted=True,
            violation=None,
            implied_epsilon=max(Fraction(0), -worst.mean_length) if worst else Fraction(0),
            advice=None,
        )
    return RuleVerdict(
        accepted=False,
        violation=worst,
        implied_epsilon=-worst.mean_length,
        advice=withdrawal_advice(g, cfg, advice_budget),
    )


def check_karp_inequality(rounds: Sequence[Observation]) -> Fraction:
    """Telescoped total of a round chain, as the KARP rule states it.

    For rounds 0..k returns ``(p_k - p_0) . x_0 - sum_i (p_i - p_{i-1})
    . x_i``, which equals the length of the round cycle 0 -> 1 -> ... ->
    k -> 0 measured arc by arc — an independent cross-check for the
    graph-based verdicts.
    """
    if len(rounds) < 2:
        raise ValueError("a round chain needs at least two rounds")
    dim = rounds[0].dimension
    for o in rounds:
        if o.dimension != dim:
            raise DimensionMismatch(f"round {o.t} has {o.dimension} items, chain has {dim}")
    first, last = rounds[0], rounds[-1]
    total = dot(
        tuple(a - b for a, b in zip(last.prices, first.prices)), first.bundle
    )
    for prev, cur in zip(rounds, rounds[1:]):
        total -= dot(
            tuple(a - b for a, b in zip(cur.prices, prev.prices)), cur.bundle
        )
    return total


def afriat_lambda(g: BiddingGraph, epsilon: Fraction) -> AfriatResult:
    """Largest arc-relaxation multiplier under which the history passes.

    Fits the minimum individually rational valuation ``v`` at its optimal
    slack, scores every arc ``(u, w)`` with witness round ``t`` by the
    critical multiplier at which ``v(w) - p_t . w >= lambda * (v(u) -
    p_t . u)`` starts holding, and bisects the candidate multipliers for
    the largest one whose deletions push the residual minimum cycle mean
    to ``-epsilon`` or above.  Deleting at any lower multiplier removes a
    superset of arcs, so the test is monotone and the bisection exact.
    """
    if epsilon < 0:
        raise ValueError(f"epsilon must be >= 0, got {epsilon}")
    values = min_ir_valuation(g).values
    critical: dict[tuple[int, int], Fraction | None] = {}
    for u, w, length in g.lengths.arcs():
        t = g.arc_witness(u, w)
        assert t is not None
        cost = g.observation_by_round[t].cost
        # witness round t bids bundle u, so p_t.u is its cost and
        # p_t.w = length + cost by the arc-length definition
        denom = values[u] - cost
        numer = values[w] - cost - length
        assert denom >= 0, "minimum IR valuation lost individual rationality"
        if numer <= 0:
            critical[(u, w)] = Fraction(0)
        elif denom == 0:
            critical[(u, w)] = None  # removed at every level
        else:
            critical[(u, w)] = numer / denom

    candidates = sorted(
        {lam for lam in critical.values() if lam is not None and 0 < lam <= 1}
        | {Fraction(1)}
    )

    def removed_at(level: Fraction) -> set[tuple[int, int]]:
        return {
            arc
            for arc, lam in critical.items()
            if lam is None or lam >= level
        }

    def residual_mu(level: Fraction) -> Fraction | None:
        return min_mean_cycle(g.lengths.without_arcs(removed_at(level))).mu

    def passes(level: Fraction) -> bool:
        mu = residual_mu(level)
        return mu is None or mu >= -epsilon

    full_mu = min_mean_cycle(g).mu
    if full_mu is None or full_mu >= -epsilon:
        return AfriatResult(
            lambda_star=Fraction(1),
            removed_arcs=(),
            residual_mu=full_mu,
            critical_values=tuple(candidates),
        )

    lo, hi = 0, len(candidates) - 1
    assert passes(candidates[lo]), "deleting every positive-critical arc must pass"
    while lo < hi:
        mid = (lo + hi + 1) // 2
        if passes(candidates[mid]):
            lo = mid
        else:
            hi = mid - 1
    star = candidates[lo]
    removed = removed_at(star)
    return AfriatResult(
        lambda_star=star,
        removed_arcs=tuple(
            (u, w, critical[(u, w)]) for u, w in sorted(removed)
        ),
        residual_mu=residual_mu(star),
        critical_values=tuple(candidates),
    )


def withdrawal_advice(
    g: BiddingGraph | ArcLengths,
    cfg: RuleConfig,
    budget: int,
    *,
    verification_cap: int = ADVICE_VERIFICATION_CAP,
) -> WithdrawalAdvice:
    """All minimum-size bundle withdrawals (within budget) restoring the rule.

    Rows of violating-cycle vertices are generated lazily: starting from
    the graph's own worst cycle, the exact minimum hitting sets over the
    rows (branch and bound) are verified by deleting their vertices and
    re-checking the rule on what remains; every failed check contributes
    its residual violating cycle as a new row, so the search only ever
    inspects cycles that block a candidate.  On termination the result is
    exactly the family of minimum-cardinality withdrawals within budget:
    any true withdrawal set hits every row, so none smaller can hide, and
    every returned set was verified directly.  If ``verification_cap``
    rule re-checks are exhausted first, the sets verified so far are
    returned with ``complete`` False (still sound, possibly not all).
    """
    if budget < 1:
        raise ValueError(f"budget must be >= 1, got {budget}")
    arc = g.lengths if isinstance(g, BiddingGraph) else g

    checked: dict[tuple[int, ...], frozenset[int] | None] = {}

    def residual_violation(drop: tuple[int, ...]) -> frozenset[int] | None:
        if drop not in checked:
            worst = _worst_relevant_cycle(arc.without_vertices(set(drop)), cfg)
            violating = worst is not None and worst.mean_length < -cfg.epsilon
            checked[drop] = frozenset(worst.vertices) if violating else None
        return checked[drop]

    first = residual_violation(())
    if first is None:
        return WithdrawalAdvice(sets=(), complete=True)
    rows: list[frozenset[int]] = [first]
    seen_rows: set[frozenset[int]] = {first}

    while True:
        candidates = _min_hitting_sets(rows, budget)
        if not candidates:
            return WithdrawalAdvice(sets=(), complete=True)
        verified: list[tuple[int, ...]] = []
        grew = False
        for cand in candidates:
            if cand not in checked and len(checked) >= verification_cap:
                return WithdrawalAdvice(sets=tuple(verified), complete=False)
            leftover = residual_violation(cand)
            if leftover is None:
                verified.append(cand)
            else:
                # the failed cand misses this cycle, so once the row is in
                # (possibly via an earlier failure in this same round) the
                # next round can never propose cand again
                grew = True
                if leftover not in seen_rows:
                    seen_rows.add(leftover)
                    rows.append(leftover)
        if not grew:
            return WithdrawalAdvice(sets=tuple(verified), complete=True)


def _min_hitting_sets(
    rows: Sequence[frozenset[int]], budget: int
) -> list[tuple[int, ...]]:
    """All minimum-cardinality hitting sets of ``rows`` with size ≤ budget.

    Branch and bound: branch on the vertices of the first row the current
    choice misses.  Every hitting set contains such a vertex, so the
    search is exhaustive; results are deduplicated and returned in
    lexicographic order.
    """
    found: set[frozenset[int]] = set()
    best = budget + 1

    def extend(chosen: frozenset[int]) -> None:
        nonlocal best
        unhit = next((row for row in rows if not (row & chosen)), None)
        if unhit is None:
            if len(chosen) < best:
                best = len(chosen)
                found.clear()
            if len(chosen) == best:
                found.add(chosen)
            return
        if len(chosen) + 1 > min(budget, best):
            return
        for v in sorted(unhit):
            extend(chosen | {v})

    extend(frozenset())
    return sorted(tuple(sorted(s)) for s in found if len(s) == best)
