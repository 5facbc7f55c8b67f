"""Revealed-preference rationality analysis for combinatorial auction bidding.

The package turns a stream of observed bids (price vector, chosen bundle)
into an exact bidding graph, diagnoses consistency through minimum-mean
cycles, fits virtual valuations, and enforces relaxed activity rules —
all in exact rational arithmetic.
"""

from .core import (
    ArcLengths,
    BiddingGraph,
    BundleInterner,
    CycleCertificate,
    Observation,
    build_bidding_graph,
    dot,
)
from .cycles import (
    BoundedCycleReport,
    MeanCycleResult,
    min_mean_cycle,
    simple_cycles,
    tight_bound_fixture,
    worst_bounded_cycle,
)
from .errors import (
    DimensionMismatch,
    DuplicateRound,
    MalformedInput,
    NegativeValue,
    RevprefError,
    StaleRound,
    UnknownRound,
    UnknownSession,
)
from .io import (
    load_observations,
    observation_to_wire,
    observations_from_jsonl,
    observations_to_jsonl,
    parse_observation,
)
from .rational import (
    RationalParseError,
    decimal_approx,
    format_rational,
    parse_rational,
    wire_string,
)
from .rules import (
    GARP,
    KARP,
    WARP,
    AfriatResult,
    RuleConfig,
    RuleVerdict,
    WithdrawalAdvice,
    afriat_lambda,
    check_karp_inequality,
    history_verdict,
    validate_bid,
    withdrawal_advice,
)
from .valuation import (
    UpperBounds,
    Valuation,
    anchored_valuation,
    bounds_from_wire,
    load_bounds,
    max_valuation,
    min_ir_valuation,
    shifted_graph,
    valuation_to_wire,
)

__version__ = "0.1.0"

__all__ = [
    "ArcLengths",
    "BiddingGraph",
    "BundleInterner",
    "CycleCertificate",
    "Observation",
    "build_bidding_graph",
    "dot",
    "BoundedCycleReport",
    "MeanCycleResult",
    "min_mean_cycle",
    "simple_cycles",
    "tight_bound_fixture",
    "worst_bounded_cycle",
    "DimensionMismatch",
    "DuplicateRound",
    "MalformedInput",
    "NegativeValue",
    "RevprefError",
    "StaleRound",
    "UnknownRound",
    "UnknownSession",
    "load_observations",
    "observation_to_wire",
    "observations_from_jsonl",
    "observations_to_jsonl",
    "parse_observation",
    "RationalParseError",
    "decimal_approx",
    "format_rational",
    "parse_rational",
    "wire_string",
    "GARP",
    "KARP",
    "WARP",
    "AfriatResult",
    "RuleConfig",
    "RuleVerdict",
    "WithdrawalAdvice",
    "afriat_lambda",
    "check_karp_inequality",
    "history_verdict",
    "validate_bid",
    "withdrawal_advice",
    "UpperBounds",
    "Valuation",
    "anchored_valuation",
    "bounds_from_wire",
    "load_bounds",
    "max_valuation",
    "min_ir_valuation",
    "shifted_graph",
    "valuation_to_wire",
    "__version__",
]
