"""The semi-constrained operator command language.

A small fixed grammar (see docs/grammar.md for the EBNF): an intent verb,
referent phrases, optional parameters. Parsing is purely syntactic; whether
"beacon alpha" exists is the interpreter's problem. Anything that does not
parse raises ParseError, which the interpreter reports as non-understanding,
never as a command.
"""

from __future__ import annotations

import enum
import re
from dataclasses import dataclass, field
from typing import Optional

WORD_RE = re.compile(r"^[a-z][a-z_-]*$")
VEHICLE_ID_RE = re.compile(r"^[a-z]+\d+$")
NUMBER_RE = re.compile(r"^-?\d+(\.\d+)?$")

COUNT_WORDS = {"one": 1, "two": 2, "three": 3, "four": 4, "five": 5, "six": 6}

STAGE_WORDS = ("observe", "orient", "decide", "act")


class Intent(str, enum.Enum):
    DISPATCH = "dispatch"
    PURSUE = "pursue"
    PLACE_BEACON = "place_beacon"
    DEFINE_ZONE = "define_zone"
    SET_MODE = "set_mode"
    QUERY_STATUS = "query_status"


class ParseError(ValueError):
    """Input that the command grammar does not cover."""


@dataclass
class TargetPhrase:
    """Who a command addresses: explicit ids, a count, or the anaphor."""

    vehicle_ids: tuple[str, ...] = ()
    count: Optional[int] = None
    anaphor: bool = False  # "them"


@dataclass
class DestinationPhrase:
    kind: str  # beacon | zone | coords | deixis
    label: Optional[str] = None
    point: Optional[tuple[float, float]] = None


@dataclass
class ParsedCommand:
    intent: Intent
    targets: Optional[TargetPhrase] = None
    destination: Optional[DestinationPhrase] = None
    zone_label: Optional[str] = None
    beacon_label: Optional[str] = None
    point: Optional[tuple[float, float]] = None  # "at X Y"
    here: bool = False  # "here": gesture-supplied position
    zone_params: dict[str, float] = field(default_factory=dict)
    mode_task: Optional[str] = None
    mode_stage: Optional[str] = None
    mode_id: Optional[str] = None


class _Tokens:
    def __init__(self, text: str) -> None:
        cleaned = text.lower().replace(",", " ")
        self.items = cleaned.split()
        self.pos = 0

    def peek(self) -> Optional[str]:
        return self.items[self.pos] if self.pos < len(self.items) else None

    def take(self) -> str:
        tok = self.peek()
        if tok is None:
            raise ParseError("unexpected end of command")
        self.pos += 1
        return tok

    def expect(self, word: str) -> None:
        tok = self.take()
        if tok != word:
            raise ParseError(f"expected {word!r}, got {tok!r}")

    def done(self) -> bool:
        return self.pos >= len(self.items)

    def require_done(self) -> None:
        if not self.done():
            raise ParseError(f"trailing input: {' '.join(self.items[self.pos:])!r}")


def _number(tokens: _Tokens, what: str) -> float:
    tok = tokens.take()
    if not NUMBER_RE.match(tok):
        raise ParseError(f"expected a number for {what}, got {tok!r}")
    return float(tok)


def _label(tokens: _Tokens, what: str) -> str:
    tok = tokens.take()
    if not WORD_RE.match(tok):
        raise ParseError(f"expected a {what} label, got {tok!r}")
    return tok


def _targets(tokens: _Tokens) -> TargetPhrase:
    tok = tokens.peek()
    if tok is None:
        raise ParseError("missing command target")
    if tok == "them":
        tokens.take()
        return TargetPhrase(anaphor=True)
    if tok in COUNT_WORDS or (tok.isdigit() and int(tok) > 0):
        count = COUNT_WORDS.get(tok, None) or int(tok)
        tokens.take()
        unit = tokens.take()
        if unit not in ("uav", "uavs", "vehicle", "vehicles"):
            raise ParseError(f"expected 'uavs' after a count, got {unit!r}")
        return TargetPhrase(count=count)
    ids = []
    while tokens.peek() is not None and VEHICLE_ID_RE.match(tokens.peek()):
        ids.append(tokens.take())
    if not ids:
        raise ParseError(f"expected vehicle ids, a count, or 'them', got {tok!r}")
    return TargetPhrase(vehicle_ids=tuple(ids))


def _destination(tokens: _Tokens) -> Optional[DestinationPhrase]:
    tok = tokens.peek()
    if tok is None:
        return None
    if tok == "beacon":
        tokens.take()
        return DestinationPhrase("beacon", label=_label(tokens, "beacon"))
    if tok == "zone":
        tokens.take()
        return DestinationPhrase("zone", label=_label(tokens, "zone"))
    if tok == "there":
        tokens.take()
        return DestinationPhrase("deixis")
    if NUMBER_RE.match(tok):
        x = _number(tokens, "x coordinate")
        y = _number(tokens, "y coordinate")
        return DestinationPhrase("coords", point=(x, y))
    raise ParseError(f"cannot read destination starting at {tok!r}")


def _zone_params(tokens: _Tokens, cmd: ParsedCommand) -> None:
    while not tokens.done():
        key = tokens.take()
        if key == "at":
            cmd.point = (_number(tokens, "x"), _number(tokens, "y"))
        elif key in ("direction", "breadth"):
            cmd.zone_params[key] = _number(tokens, key)
        elif key == "range":
            cmd.zone_params["range"] = _number(tokens, "range")
        elif key == "here":
            cmd.here = True
        else:
            raise ParseError(f"unknown zone parameter {key!r}")


def parse(text: str) -> ParsedCommand:
    """Parse an operator command line; raises ParseError on anything else."""
    if not text or not text.strip():
        raise ParseError("empty command")
    tokens = _Tokens(text)
    first = tokens.peek()

    if first == "place":
        tokens.take()
        tokens.expect("beacon")
        cmd = ParsedCommand(Intent.PLACE_BEACON, beacon_label=_label(tokens, "beacon"))
        if not tokens.done():
            nxt = tokens.take()
            if nxt == "at":
                cmd.point = (_number(tokens, "x"), _number(tokens, "y"))
            elif nxt == "here":
                cmd.here = True
            else:
                raise ParseError(f"unexpected {nxt!r} after beacon label")
        tokens.require_done()
        return cmd

    if first == "define":
        tokens.take()
        tokens.expect("zone")
        cmd = ParsedCommand(Intent.DEFINE_ZONE, zone_label=_label(tokens, "zone"))
        _zone_params(tokens, cmd)
        tokens.require_done()
        return cmd

    if first == "set":
        tokens.take()
        task = _label(tokens, "task")
        stage = tokens.take()
        if stage not in STAGE_WORDS:
            raise ParseError(f"expected an OODA stage, got {stage!r}")
        tokens.expect("mode")
        mode_id = tokens.take()
        if not re.match(r"^[a-z0-9][a-z0-9_-]*$", mode_id):
            raise ParseError(f"malformed mode id {mode_id!r}")
        tokens.require_done()
        return ParsedCommand(Intent.SET_MODE, mode_task=task, mode_stage=stage, mode_id=mode_id)

    if first == "status":
        tokens.take()
        cmd = ParsedCommand(Intent.QUERY_STATUS)
        if not tokens.done():
            cmd.targets = _targets(tokens)
        tokens.require_done()
        return cmd

    if first == "send":
        tokens.take()
        targets = _targets(tokens)
        if tokens.peek() == "to":
            tokens.take()
        cmd = ParsedCommand(Intent.DISPATCH, targets=targets)
        cmd.destination = _destination(tokens)
        tokens.require_done()
        return cmd

    # Remaining forms start with a target phrase: dispatch or pursue.
    targets = _targets(tokens)
    verb = tokens.take()
    if verb == "go":
        tokens.expect("to")
        verb = "goto"
    if verb == "goto":
        cmd = ParsedCommand(Intent.DISPATCH, targets=targets)
        cmd.destination = _destination(tokens)
        tokens.require_done()
        return cmd
    if verb == "pursue":
        cmd = ParsedCommand(Intent.PURSUE, targets=targets)
        if not tokens.done():
            tokens.expect("zone")
            cmd.zone_label = _label(tokens, "zone")
        tokens.require_done()
        return cmd
    raise ParseError(f"unknown command verb {verb!r}")
