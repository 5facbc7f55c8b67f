"""Session-oriented what-if HTTP service over committed bid histories.

Each session holds one bidder's committed observation stream together
with its incrementally maintained bidding graph.  Committing a bid
enforces the session rule (a rejected bid returns its verdict and leaves
the state untouched); what-if evaluation answers the same question
without mutating anything; withdrawals rebuild the graph on the
surviving rounds.  Accepted mutations are appended to a per-session
JSONL event log so a restarted service recovers every session by replay.

All request and response numbers are exact decimal/ratio strings — the
service never round-trips verdict-relevant quantities through floats.
"""

from __future__ import annotations

import argparse
import json
import os
import threading
import uuid
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path
from typing import Sequence

from fastapi import FastAPI, Request
from fastapi.responses import JSONResponse

from .core import BiddingGraph, Observation, build_bidding_graph
from .cycles import MeanCycleResult, min_mean_cycle
from .errors import (
    DimensionMismatch,
    MalformedInput,
    RevprefError,
    StaleRound,
    UnknownRound,
    UnknownSession,
)
from .io import observation_to_wire, parse_observation
from .rational import wire_string
from .rules import GARP, RuleConfig, RuleVerdict, history_verdict
from .valuation import (
    Valuation,
    bounds_from_wire,
    max_valuation,
    min_ir_valuation,
    valuation_to_wire,
)

_STATUS_BY_ERROR: tuple[tuple[type[RevprefError], int, str], ...] = (
    (UnknownSession, 404, "unknown_session"),
    (UnknownRound, 404, "unknown_round"),
    (StaleRound, 409, "stale_round"),
    (DimensionMismatch, 409, "dimension_mismatch"),
)


def _error_response(exc: Exception) -> JSONResponse:
    for kind, status, code in _STATUS_BY_ERROR:
        if isinstance(exc, kind):
            return JSONResponse(
                status_code=status, content={"error": code, "detail": str(exc)}
            )
    return JSONResponse(
        status_code=400, content={"error": "malformed", "detail": str(exc)}
    )


def _mean_cycle(graph: BiddingGraph | None) -> MeanCycleResult:
    if graph is None:
        return MeanCycleResult(mu=None, certificate=None)
    return min_mean_cycle(graph)


@dataclass
class Session:
    """One bidder's committed history and its cached diagnostics.

    ``graph`` is None while the session is empty and is replaced (never
    mutated) on commit/withdraw, so readers that snapshot the attribute
    once see a consistent committed state without locking.  The caches
    are keyed by graph identity, which invalidates them automatically
    whenever a mutation swaps the graph.
    """

    id: str
    dimension: int
    config: RuleConfig
    graph: BiddingGraph | None = None
    lock: threading.RLock = field(default_factory=threading.RLock)
    _mean_cache: tuple[BiddingGraph | None, MeanCycleResult] | None = None
    _min_ir_cache: tuple[BiddingGraph, Valuation] | None = None

    @property
    def observations(self) -> tuple[Observation, ...]:
        return () if self.graph is None else self.graph.observations

    def mean_cycle_for(self, graph: BiddingGraph | None) -> MeanCycleResult:
        cached = self._mean_cache
        if cached is not None and cached[0] is graph:
            return cached[1]
        result = _mean_cycle(graph)
        self._mean_cache = (graph, result)
        return result

    def min_ir_for(self, graph: BiddingGraph) -> Valuation:
        cached = self._min_ir_cache
        if cached is not None and cached[0] is graph:
            return cached[1]
        valuation = min_ir_valuation(graph)
        self._min_ir_cache = (graph, valuation)
        return valuation


class SessionStore:
    """Registry of live sessions with optional append-only event logs.

    With a storage directory, every state-changing event (create, the
    accepted commits, withdrawals) is appended to ``<id>.jsonl`` before
    the call returns; a store constructed over the same directory
    replays those logs and recovers every session.  Without one the
    store is purely in-memory.
    """

    def __init__(self, storage_dir: str | Path | None = None) -> None:
        self._sessions: dict[str, Session] = {}
        self._registry_lock = threading.Lock()
        self._storage = Path(storage_dir) if storage_dir is not None else None
        if self._storage is not None:
            self._storage.mkdir(parents=True, exist_ok=True)
            self._recover()

    def create(self, dimension: int, config: RuleConfig) -> Session:
        session = Session(id=uuid.uuid4().hex, dimension=dimension, config=config)
        with self._registry_lock:
            self._sessions[session.id] = session
        self._append(
            session,
            {
                "event": "create",
                "id": session.id,
                "dimension": dimension,
                "rule": config.to_wire(),
            },
        )
        return session

    def get(self, session_id: str) -> Session:
        session = self._sessions.get(session_id)
        if session is None:
            raise UnknownSession(f"unknown session id {session_id!r}")
        return session

    def commit(self, session: Session, obs: Observation) -> RuleVerdict:
        """Enforce the session rule; append the bid only when it passes."""
        with session.lock:
            graph = session.graph
            _check_dimension(session.dimension, obs)
            candidate = _extended(graph, obs)
            verdict = history_verdict(candidate, session.config)
            if verdict.accepted:
                session.graph = candidate
                self._append(
                    session,
                    {"event": "commit", "observation": observation_to_wire(obs)},
                )
            return verdict

    def withdraw(self, session: Session, round_ids: Sequence[int]) -> None:
        """Remove rounds and rebuild; an empty id list is a no-op."""
        with session.lock:
            if not round_ids:
                return
            graph = session.graph
            if graph is None:
                raise UnknownRound(f"unknown round ids: {sorted(set(round_ids))}")
            session.graph = graph.without_rounds(round_ids)
            self._append(
                session, {"event": "withdraw", "rounds": sorted(set(round_ids))}
            )

    def _append(self, session: Session, event: dict) -> None:
        if self._storage is None:
            return
        path = self._storage / f"{session.id}.jsonl"
        with path.open("a", encoding="utf-8") as fh:
            fh.write(json.dumps(event, separators=(",", ":")) + "\n")

    def _recover(self) -> None:
        assert self._storage is not None
        for path in sorted(self._storage.glob("*.jsonl")):
            session = self._replay(path)
            self._sessions[session.id] = session

    def _replay(self, path: Path) -> Session:
        session: Session | None = None
        for lineno, line in enumerate(
            path.read_text(encoding="utf-8").splitlines(), start=1
        ):
            if not line.strip():
                continue
            where = f"{path.name} line {lineno}"
            try:
                event = json.loads(line)
            except json.JSONDecodeError as exc:
                raise MalformedInput(f"{where}: invalid JSON: {exc.msg}") from exc
            if not isinstance(event, dict):
                raise MalformedInput(f"{where}: expected an event object")
            kind = event.get("event")
            if kind == "create":
                if session is not None:
                    raise MalformedInput(f"{where}: duplicate create event")
                dimension = event.get("dimension")
                if not _is_positive_int(dimension):
                    raise MalformedInput(f"{where}: bad dimension {dimension!r}")
                session = Session(
                    id=str(event.get("id", path.stem)),
                    dimension=dimension,
                    config=RuleConfig.from_wire(event.get("rule")),
                )
            elif session is None:
                raise MalformedInput(f"{where}: event before create")
            elif kind == "commit":
                obs = parse_observation(event.get("observation"), where=where)
                session.graph = _extended(session.graph, obs)
            elif kind == "withdraw":
                rounds = event.get("rounds")
                if not isinstance(rounds, list):
                    raise MalformedInput(f"{where}: rounds must be an array")
                if session.graph is None:
                    raise MalformedInput(f"{where}: withdraw from an empty session")
                session.graph = session.graph.without_rounds(rounds)
            else:
                raise MalformedInput(f"{where}: unknown event {kind!r}")
        if session is None:
            raise MalformedInput(f"{path.name}: no create event")
        return session


def _extended(graph: BiddingGraph | None, obs: Observation) -> BiddingGraph:
    if graph is None:
        return build_bidding_graph([obs])
    return graph.with_observation(obs)


def _check_dimension(dimension: int, obs: Observation) -> None:
    if obs.dimension != dimension:
        raise DimensionMismatch(
            f"round {obs.t} has {obs.dimension} items, session has {dimension}"
        )


def _is_positive_int(value: object) -> bool:
    return isinstance(value, int) and not isinstance(value, bool) and value >= 1


def _delta_mu(before: Fraction | None, after: Fraction | None) -> Fraction | None:
    """Effect of a prospective bid on the minimum cycle mean.

    Adding a round can only create cycles or lower existing means, so the
    one incomparable case is a first cycle appearing where there was none
    (reported as None); two acyclic graphs count as an unchanged 0.
    """
    if before is None and after is None:
        return Fraction(0)
    if before is None or after is None:
        return None
    return after - before


def _analysis_doc(session: Session, graph: BiddingGraph | None) -> dict:
    mean = session.mean_cycle_for(graph)
    verdict = history_verdict(graph, session.config)
    doc: dict = {
        "id": session.id,
        "dimension": session.dimension,
        "rule": session.config.to_wire(),
        "observations": [],
        "vertices": [],
        "arcs": [],
        "mu": None if mean.mu is None else wire_string(mean.mu),
        "certificate": None
        if mean.certificate is None
        else mean.certificate.to_wire(),
        "verdict": verdict.to_wire(),
    }
    if graph is None:
        return doc
    doc["observations"] = [observation_to_wire(o) for o in graph.observations]
    doc["vertices"] = [
        {
            "id": u,
            "bundle": [wire_string(q) for q in bundle],
            "rounds": [o.t for o in graph.rounds_at[u]],
        }
        for u, bundle in enumerate(graph.bundles)
    ]
    doc["arcs"] = [
        {
            "from": u,
            "to": w,
            "length": wire_string(length),
            "witness": graph.arc_witness(u, w),
        }
        for u, w, length in graph.lengths.arcs()
    ]
    return doc


def _whatif_doc(session: Session, obs: Observation) -> dict:
    graph = session.graph
    _check_dimension(session.dimension, obs)
    candidate = _extended(graph, obs)
    verdict = history_verdict(candidate, session.config)
    before = session.mean_cycle_for(graph)
    after = _mean_cycle(candidate)
    delta = _delta_mu(before.mu, after.mu)
    doc = verdict.to_wire()
    doc["mu"] = None if after.mu is None else wire_string(after.mu)
    doc["delta_mu"] = None if delta is None else wire_string(delta)
    return doc


def _valuations_doc(session: Session, bounds_raw: str | None) -> dict:
    graph = session.graph
    if graph is None:
        if bounds_raw is not None:
            raise MalformedInput("bounds: session has no observations")
        return {
            "min": {"epsilon": "0", "individually_rational": True, "values": []},
            "max": None,
        }
    doc: dict = {
        "min": valuation_to_wire(session.min_ir_for(graph), graph),
        "max": None,
    }
    if bounds_raw is not None:
        try:
            parsed = json.loads(bounds_raw)
        except json.JSONDecodeError as exc:
            raise MalformedInput(f"bounds: invalid JSON: {exc.msg}") from exc
        bounds = bounds_from_wire(parsed, graph)
        doc["max"] = valuation_to_wire(max_valuation(graph, bounds), graph)
    return doc


async def _json_body(request: Request) -> object:
    try:
        return await request.json()
    except json.JSONDecodeError as exc:
        raise MalformedInput(f"request body: invalid JSON: {exc.msg}") from exc


def create_app(storage_dir: str | Path | None = None) -> FastAPI:
    """Build the service; a storage directory enables persistence.

    Without an explicit directory the REVPREF_STORAGE environment
    variable is consulted, so the app also works as
    ``uvicorn revpref.service:create_app --factory``.
    """
    if storage_dir is None:
        storage_dir = os.environ.get("REVPREF_STORAGE") or None
    store = SessionStore(storage_dir)
    app = FastAPI(title="revpref service", version="0.1.0")
    app.state.store = store

    @app.exception_handler(RevprefError)
    async def _domain_error(request: Request, exc: RevprefError) -> JSONResponse:
        return _error_response(exc)

    @app.exception_handler(ValueError)
    async def _value_error(request: Request, exc: ValueError) -> JSONResponse:
        return _error_response(exc)

    @app.post("/sessions", status_code=201)
    async def create_session(request: Request) -> dict:
        payload = await _json_body(request)
        if not isinstance(payload, dict):
            raise MalformedInput("request body: expected an object")
        dimension = payload.get("dimension")
        if not _is_positive_int(dimension):
            raise MalformedInput(
                f"dimension must be a positive integer, got {dimension!r}"
            )
        rule = payload.get("rule")
        config = RuleConfig(rule=GARP) if rule is None else RuleConfig.from_wire(rule)
        session = store.create(dimension, config)
        return {
            "id": session.id,
            "dimension": session.dimension,
            "rule": session.config.to_wire(),
        }

    @app.post("/sessions/{session_id}/bids")
    async def commit_bid(session_id: str, request: Request) -> dict:
        session = store.get(session_id)
        obs = parse_observation(await _json_body(request), where="bid")
        return store.commit(session, obs).to_wire()

    @app.post("/sessions/{session_id}/whatif")
    async def whatif(session_id: str, request: Request) -> dict:
        session = store.get(session_id)
        obs = parse_observation(await _json_body(request), where="bid")
        return _whatif_doc(session, obs)

    @app.get("/sessions/{session_id}/analysis")
    async def analysis(session_id: str) -> dict:
        session = store.get(session_id)
        return _analysis_doc(session, session.graph)

    @app.get("/sessions/{session_id}/valuations")
    async def valuations(session_id: str, bounds: str | None = None) -> dict:
        session = store.get(session_id)
        return _valuations_doc(session, bounds)

    @app.post("/sessions/{session_id}/withdrawals")
    async def withdrawals(session_id: str, request: Request) -> dict:
        session = store.get(session_id)
        payload = await _json_body(request)
        if not isinstance(payload, dict) or not isinstance(
            payload.get("rounds"), list
        ):
            raise MalformedInput('request body: expected {"rounds": [...]}')
        rounds = payload["rounds"]
        for rid in rounds:
            if isinstance(rid, bool) or not isinstance(rid, int):
                raise MalformedInput(f"rounds: expected integers, got {rid!r}")
        store.withdraw(session, rounds)
        return _analysis_doc(session, session.graph)

    return app


def main(argv: Sequence[str] | None = None) -> int:
    """Serve over HTTP with uvicorn (installed via the service extra)."""
    import uvicorn

    parser = argparse.ArgumentParser(
        prog="revpref-service",
        description="Run the what-if bid analysis service.",
    )
    parser.add_argument("--host", default="127.0.0.1")
    parser.add_argument("--port", type=int, default=8000)
    parser.add_argument(
        "--storage",
        default=None,
        help="directory for per-session JSONL event logs (default: in-memory)",
    )
    args = parser.parse_args(argv)
    uvicorn.run(create_app(args.storage), host=args.host, port=args.port)
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
