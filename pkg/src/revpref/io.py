"""Observation serialization: the JSON Lines round format.

One JSON object per line, e.g. ``{"t": 3, "p": ["2", "1.5"], "x": ["1",
"0"]}``: round id, item prices, quantities bid for.  Numbers travel as
strings so they stay exact; the item count is fixed by the first line and
enforced on the rest.
"""

from __future__ import annotations

import json
from pathlib import Path
from typing import Sequence

from .core import Observation
from .errors import DimensionMismatch, MalformedInput, NegativeValue
from .rational import RationalParseError, parse_rational, wire_string


def parse_observation(obj: object, where: str = "observation") -> Observation:
    """Convert one wire object into an Observation.

    Raises MalformedInput naming ``where`` on any structural or numeric
    problem.
    """
    if not isinstance(obj, dict):
        raise MalformedInput(f"{where}: expected an object, got {type(obj).__name__}")
    missing = {"t", "p", "x"} - obj.keys()
    if missing:
        raise MalformedInput(f"{where}: missing key(s) {sorted(missing)}")
    t = obj["t"]
    if isinstance(t, bool) or not isinstance(t, int):
        raise MalformedInput(f"{where}: \"t\" must be an integer, got {t!r}")
    try:
        prices = tuple(parse_rational(v) for v in _string_list(obj["p"], where, "p"))
        bundle = tuple(parse_rational(v) for v in _string_list(obj["x"], where, "x"))
        return Observation(t=t, prices=prices, bundle=bundle)
    except (RationalParseError, NegativeValue, DimensionMismatch, ValueError) as exc:
        raise MalformedInput(f"{where}: {exc}") from exc


def _string_list(value: object, where: str, key: str) -> list[str]:
    if not isinstance(value, list) or not value:
        raise MalformedInput(f"{where}: \"{key}\" must be a non-empty array of strings")
    for v in value:
        if not isinstance(v, str):
            raise MalformedInput(f"{where}: \"{key}\" must contain only strings, got {v!r}")
    return value


def observations_from_jsonl(text: str) -> list[Observation]:
    """Parse a JSON Lines document; blank lines are skipped.

    Dimension consistency with the first round and numeric validity are
    checked here; round-id uniqueness is left to graph construction.
    """
    out: list[Observation] = []
    dimension: int | None = None
    for line_no, line in enumerate(text.splitlines(), start=1):
        if not line.strip():
            continue
        where = f"line {line_no}"
        try:
            obj = json.loads(line)
        except json.JSONDecodeError as exc:
            raise MalformedInput(f"{where}: invalid JSON: {exc.msg}") from exc
        obs = parse_observation(obj, where)
        if dimension is None:
            dimension = obs.dimension
        elif obs.dimension != dimension:
            raise MalformedInput(
                f"{where}: {obs.dimension} items, but the first round has {dimension}"
            )
        out.append(obs)
    return out


def load_observations(path: str | Path) -> list[Observation]:
    return observations_from_jsonl(Path(path).read_text())


def observation_to_wire(obs: Observation) -> dict:
    return {
        "t": obs.t,
        "p": [wire_string(v) for v in obs.prices],
        "x": [wire_string(v) for v in obs.bundle],
    }


def observations_to_jsonl(observations: Sequence[Observation]) -> str:
    return "".join(
        json.dumps(observation_to_wire(o), separators=(", ", ": ")) + "\n"
        for o in observations
    )
