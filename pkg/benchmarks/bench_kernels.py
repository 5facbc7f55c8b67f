"""Benchmark the compiled walk-table kernels against the pure-Python twin.

Runs the three kernel-bound operations (global minimum cycle mean,
cardinality-bounded cycle search, least IR valuation fit) on the same
deterministic inputs under both dispatch modes and prints a timing
table.  Dispatch is flipped per call through ``REVPREF_PURE``, and both
modes must return identical results — the run aborts otherwise.

Usage::

    python3 benchmarks/bench_kernels.py [--sizes 60 120 200] [--repeats 3]
"""

from __future__ import annotations

import argparse
import os
import random
import time
from fractions import Fraction

from revpref.core import ArcLengths, Observation, build_bidding_graph
from revpref.cycles import min_mean_cycle, worst_bounded_cycle
from revpref.kernels import COMPILED_AVAILABLE, active_kernel
from revpref.valuation import min_ir_valuation

SEED = 17


def random_lengths(rng: random.Random, n: int) -> ArcLengths:
    matrix = [
        [None if u == w else Fraction(rng.randint(-10, 10)) for w in range(n)]
        for u in range(n)
    ]
    return ArcLengths.from_fractions(n, matrix)


def random_graph(rng: random.Random, rounds: int, dimension: int):
    observations = [
        Observation(
            t,
            tuple(str(rng.randint(0, 9)) for _ in range(dimension)),
            tuple(str(rng.randint(0, 4)) for _ in range(dimension)),
        )
        for t in range(1, rounds + 1)
    ]
    return build_bidding_graph(observations)


def best_of(repeats: int, op):
    best, result = None, None
    for _ in range(repeats):
        started = time.perf_counter()
        result = op()
        elapsed = time.perf_counter() - started
        best = elapsed if best is None or elapsed < best else best
    return best, result


def timed_pair(repeats: int, op):
    """(compiled seconds, pure seconds) for one operation, equal results."""
    os.environ.pop("REVPREF_PURE", None)
    assert active_kernel() == "compiled"
    fast, fast_result = best_of(repeats, op)
    os.environ["REVPREF_PURE"] = "1"
    assert active_kernel() == "pure"
    slow, slow_result = best_of(repeats, op)
    os.environ.pop("REVPREF_PURE", None)
    if fast_result != slow_result:
        raise SystemExit(f"kernel results diverged: {fast_result!r} != {slow_result!r}")
    return fast, slow


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument(
        "--sizes", type=int, nargs="+", default=[60, 120, 200],
        help="vertex counts for the random complete digraphs",
    )
    parser.add_argument(
        "--repeats", type=int, default=3, help="timing repeats (best is kept)"
    )
    args = parser.parse_args(argv)

    if not COMPILED_AVAILABLE:
        raise SystemExit("compiled extension not importable; nothing to compare")

    rng = random.Random(SEED)
    rows = []
    for n in args.sizes:
        arc = random_lengths(rng, n)
        rows.append((f"min_mean_cycle, {n} vertices", *timed_pair(
            args.repeats, lambda arc=arc: min_mean_cycle(arc).mu
        )))
    for n in args.sizes:
        arc = random_lengths(rng, n)
        rows.append((f"worst_bounded_cycle k=3, {n} vertices", *timed_pair(
            args.repeats,
            lambda arc=arc: (lambda r: r.worst and r.worst.mean_length)(
                worst_bounded_cycle(arc, 3)
            ),
        )))
    graph = random_graph(rng, rounds=200, dimension=3)
    rows.append((f"min_ir_valuation, 200 rounds ({graph.n_vertices} bundles)",
                 *timed_pair(args.repeats, lambda: min_ir_valuation(graph).epsilon)))

    width = max(len(label) for label, _, _ in rows)
    print(f"{'operation':<{width}}  {'compiled':>10}  {'pure':>10}  {'speedup':>8}")
    for label, fast, slow in rows:
        print(f"{label:<{width}}  {fast * 1000:>8.1f}ms  {slow * 1000:>8.1f}ms  "
              f"{slow / fast:>7.1f}x")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
