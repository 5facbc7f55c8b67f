"""Command-line interface.

Commands: ``analyze`` (graph statistics, worst cycle, rule verdicts),
``fit`` (min/max valuations), ``validate`` (replay a history round by
round), ``afriat`` (relaxation multiplier), ``withdraw`` (withdrawal
advice), and ``fixture`` (extremal test graph).  Exit codes: 0 success,
1 rule violation, 2 malformed input or usage error.

All output is byte-deterministic for fixed input and flags.  Rationals
appear as an exact machine field plus a decimal approximation.
"""

from __future__ import annotations

import argparse
import json
import sys
from fractions import Fraction
from typing import Sequence

from .core import BiddingGraph, build_bidding_graph
from .cycles import min_mean_cycle, tight_bound_fixture, worst_bounded_cycle
from .errors import RevprefError
from .io import load_observations
from .rational import RationalParseError, decimal_approx, parse_rational, wire_string
from .rules import GARP, KARP, WARP, RuleConfig, afriat_lambda, validate_bid, withdrawal_advice
from .valuation import UpperBounds, load_bounds, max_valuation, min_ir_valuation, valuation_to_wire

EXIT_OK = 0
EXIT_VIOLATION = 1
EXIT_MALFORMED = 2


def _rational_arg(text: str) -> Fraction:
    try:
        return parse_rational(text)
    except RationalParseError as exc:
        raise argparse.ArgumentTypeError(str(exc))


def _block(q: Fraction) -> dict:
    """Exact rational plus decimal approximation, for report fields."""
    return {"exact": wire_string(q), "approx": decimal_approx(q)}


def _emit(doc: dict, lines: list[str], fmt: str, out) -> None:
    if fmt == "json":
        out.write(json.dumps(doc, separators=(", ", ": ")) + "\n")
    else:
        out.write("\n".join(lines) + "\n")


def _load_graph(path: str) -> BiddingGraph:
    observations = load_observations(path)
    if not observations:
        raise RevprefError("no observations")
    return build_bidding_graph(observations)


def _config_from_args(args) -> RuleConfig:
    k = args.k
    if args.rule == KARP and k is None:
        raise RevprefError("--rule karp requires --k")
    if args.rule != KARP:
        k = None
    return RuleConfig(args.rule, k=k, epsilon=args.epsilon)


def _verdict_text(mean: Fraction | None, epsilon: Fraction) -> tuple[bool, Fraction]:
    passed = mean is None or mean >= -epsilon
    implied = Fraction(0) if mean is None else max(Fraction(0), -mean)
    return passed, implied


def cmd_analyze(args, out) -> int:
    g = _load_graph(args.input)
    result = min_mean_cycle(g)
    k = args.k if args.k is not None else 1
    bounded = worst_bounded_cycle(g, k) if g.n_vertices > 1 else None
    digons = worst_bounded_cycle(g, 1) if g.n_vertices > 1 else None

    verdicts: dict = {}
    lines = [
        f"rounds: {len(g.observations)}  bundles: {g.n_vertices}  arcs: {g.lengths.arc_count}",
    ]
    if result.mu is None:
        lines.append("mu: none (no cycles)")
    else:
        lines.append(f"mu: {wire_string(result.mu)} (~{decimal_approx(result.mu)})")
    rule_means = {
        WARP: None if digons is None or digons.worst is None else digons.worst.mean_length,
        KARP: None if bounded is None or bounded.worst is None else bounded.worst.mean_length,
        GARP: result.mu,
    }
    for rule in (WARP, KARP, GARP):
        passed, implied = _verdict_text(rule_means[rule], args.epsilon)
        entry = {"accepted": passed, "implied_epsilon": _block(implied)}
        if rule == KARP:
            entry["k"] = k
        verdicts[rule] = entry
        label = f"karp(k={k})" if rule == KARP else rule
        lines.append(
            f"{label}: {'pass' if passed else 'FAIL'}"
            f" (implied epsilon {wire_string(implied)})"
        )

    doc = {
        "rounds": len(g.observations),
        "bundles": g.n_vertices,
        "arcs": g.lengths.arc_count,
        "mu": None if result.mu is None else _block(result.mu),
        "certificate": None if result.certificate is None else result.certificate.to_wire(),
        "epsilon": _block(args.epsilon),
        "verdicts": verdicts,
    }
    if result.certificate is not None:
        cert = result.certificate
        lines.append(
            "worst cycle: "
            + " -> ".join(str(v) for v in cert.vertices)
            + f" (mean {wire_string(cert.mean_length)},"
            + f" rounds {', '.join(str(t) for t in cert.witness_rounds)})"
        )
    if result.mu is not None and result.mu > 0:
        # Strictly positive mu leaves that much slack at every constraint.
        doc["confidence"] = _block(result.mu)
        lines.append(f"confidence: {wire_string(result.mu)}")
    _emit(doc, lines, args.format, out)
    return EXIT_OK if verdicts[args.rule]["accepted"] else EXIT_VIOLATION


def cmd_fit(args, out) -> int:
    g = _load_graph(args.input)
    if args.kind == "min":
        valuation = min_ir_valuation(g)
    else:
        if not args.bounds:
            raise RevprefError("fit max requires --bounds")
        bounds = load_bounds(args.bounds, g)
        valuation = max_valuation(g, bounds)
    doc = valuation_to_wire(valuation, g)
    lines = [
        f"epsilon: {doc['epsilon']}",
        f"individually_rational: {str(valuation.individually_rational).lower()}",
    ]
    for entry in doc["values"]:
        lines.append(f"bundle [{', '.join(entry['bundle'])}]: {entry['value']}")
    for u in valuation.unbounded:
        lines.append(f"bundle {u}: unbounded")
    _emit(doc, lines, args.format, out)
    return EXIT_OK


def cmd_validate(args, out) -> int:
    observations = load_observations(args.input)
    if not observations:
        raise RevprefError("no observations")
    cfg = _config_from_args(args)
    history: list = []
    graph: BiddingGraph | None = None
    rejected = 0
    lines = []
    docs = []
    for obs in observations:
        verdict = validate_bid(history, obs, cfg, base_graph=graph)
        doc = {"t": obs.t} | verdict.to_wire()
        docs.append(doc)
        status = "accept" if verdict.accepted else "REJECT"
        detail = f" implied epsilon {wire_string(verdict.implied_epsilon)}"
        if verdict.violation is not None:
            cycle = " -> ".join(str(v) for v in verdict.violation.vertices)
            detail += f", cycle {cycle}"
        lines.append(f"round {obs.t}: {status}{detail}")
        if not verdict.accepted:
            rejected += 1
        history.append(obs)
        graph = graph.with_observation(obs) if graph is not None else build_bidding_graph([obs])
    summary = {
        "rounds": len(observations),
        "accepted": len(observations) - rejected,
        "rejected": rejected,
        "rule": cfg.to_wire(),
    }
    lines.append(
        f"summary: {summary['accepted']}/{summary['rounds']} accepted under {cfg.rule}"
    )
    if args.format == "json":
        for doc in docs:
            out.write(json.dumps(doc, separators=(", ", ": ")) + "\n")
        out.write(json.dumps({"summary": summary}, separators=(", ", ": ")) + "\n")
    else:
        out.write("\n".join(lines) + "\n")
    return EXIT_VIOLATION if rejected else EXIT_OK


def cmd_afriat(args, out) -> int:
    g = _load_graph(args.input)
    result = afriat_lambda(g, args.epsilon)
    doc = {
        "lambda_star": wire_string(result.lambda_star),
        "critical_values": [wire_string(c) for c in result.critical_values],
        "removed_arcs": [
            {
                "from": u,
                "to": w,
                "critical": None if critical is None else wire_string(critical),
            }
            for u, w, critical in result.removed_arcs
        ],
        "residual_mu": None if result.residual_mu is None else wire_string(result.residual_mu),
    }
    lines = [f"lambda_star: {doc['lambda_star']}"]
    for arc in doc["removed_arcs"]:
        critical = arc["critical"] if arc["critical"] is not None else "always"
        lines.append(f"removed arc {arc['from']} -> {arc['to']} (critical {critical})")
    lines.append(
        "residual mu: "
        + (doc["residual_mu"] if doc["residual_mu"] is not None else "none (no cycles)")
    )
    _emit(doc, lines, args.format, out)
    return EXIT_OK


def cmd_withdraw(args, out) -> int:
    g = _load_graph(args.input)
    cfg = _config_from_args(args)
    advice = withdrawal_advice(g, cfg, budget=args.budget)
    violated = bool(advice.sets) or _has_violation(g, cfg)
    doc = {
        "violation": violated,
        "sets": [list(s) for s in advice.sets],
        "complete": advice.complete,
    }
    if not violated:
        lines = ["no violation; nothing to withdraw"]
    elif not advice.sets:
        lines = [f"no withdrawal of at most {args.budget} bundles restores the rule"]
    else:
        lines = [
            "withdraw bundles " + ", ".join(str(u) for u in s) for s in advice.sets
        ]
    _emit(doc, lines, args.format, out)
    return EXIT_VIOLATION if violated else EXIT_OK


def _has_violation(g: BiddingGraph, cfg: RuleConfig) -> bool:
    bound = cfg.cycle_bound
    if g.n_vertices < 2:
        return False
    if bound is None:
        mu = min_mean_cycle(g).mu
        return mu is not None and mu < -cfg.epsilon
    worst = worst_bounded_cycle(g, bound - 1).worst
    return worst is not None and worst.mean_length < -cfg.epsilon


def cmd_fixture(args, out) -> int:
    try:
        arc = tight_bound_fixture(args.k, args.lmax, args.n)
    except ValueError as exc:
        raise RevprefError(str(exc)) from exc
    matrix = [
        [None if arc.length(u, w) is None else wire_string(arc.length(u, w)) for w in range(arc.n)]
        for u in range(arc.n)
    ]
    mu = min_mean_cycle(arc).mu
    doc = {"n": arc.n, "lengths": matrix, "mu": _block(mu)}
    lines = [f"n: {arc.n}", f"mu: {wire_string(mu)}"]
    for row in matrix:
        lines.append(" ".join("." if cell is None else cell for cell in row))
    _emit(doc, lines, args.format, out)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="revpref",
        description="Bidding-graph consistency analysis over exact rationals.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--format", choices=("text", "json"), default="text")

    rule_flags = argparse.ArgumentParser(add_help=False)
    rule_flags.add_argument("--rule", choices=(WARP, KARP, GARP), default=GARP)
    rule_flags.add_argument("--k", type=int, default=None)
    rule_flags.add_argument("--epsilon", type=_rational_arg, default=Fraction(0))

    p = sub.add_parser("analyze", parents=[common, rule_flags], help="graph report and rule verdicts")
    p.add_argument("input")
    p.set_defaults(func=cmd_analyze)

    p = sub.add_parser("fit", parents=[common], help="fit a valuation")
    p.add_argument("input")
    p.add_argument("kind", choices=("min", "max"))
    p.add_argument("--bounds", default=None)
    p.set_defaults(func=cmd_fit)

    p = sub.add_parser("validate", parents=[common, rule_flags], help="replay a history round by round")
    p.add_argument("input")
    p.set_defaults(func=cmd_validate)

    p = sub.add_parser("afriat", parents=[common], help="arc-relaxation multiplier")
    p.add_argument("input")
    p.add_argument("--epsilon", type=_rational_arg, default=Fraction(0))
    p.set_defaults(func=cmd_afriat)

    p = sub.add_parser("withdraw", parents=[common, rule_flags], help="withdrawal advice")
    p.add_argument("input")
    p.add_argument("--budget", type=int, default=2)
    p.set_defaults(func=cmd_withdraw)

    p = sub.add_parser("fixture", parents=[common], help="extremal bounded-cycle test graph")
    p.add_argument("kind", choices=("tight-bound",))
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--lmax", type=_rational_arg, required=True)
    p.add_argument("--n", type=int, required=True)
    p.set_defaults(func=cmd_fixture)

    return parser


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args, sys.stdout)
    except (RevprefError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_MALFORMED


if __name__ == "__main__":
    sys.exit(main())
