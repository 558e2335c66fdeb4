"""Utterance interpretation: intent plus resolved referents.

Three escalating styles of handling ambiguity:

* strict-confirm never resolves a contested reference itself; anything
  short of an exact, unique match comes back as Ambiguous for the operator
  to settle (high operator burden, builds grounding);
* context-rank scores candidates by label match, proximity, and grounding
  recency, and picks the leader only when it dominates by a margin;
* auto-resolve always takes the top-ranked candidate.

Failure to parse, or a reference with no candidate at all, is
non-understanding: confidence Failed, never a command.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field, replace
from typing import Optional

from swarmpatrol.dialogue import grammar
from swarmpatrol.dialogue.context import DialogueContext, OperatorUtterance, Point
from swarmpatrol.dialogue.grammar import Intent, ParsedCommand


class InterpStrategy(str, enum.Enum):
    STRICT_CONFIRM = "strict_confirm"
    CONTEXT_RANK = "context_rank"
    AUTO_RESOLVE = "auto_resolve"


class Confidence(str, enum.Enum):
    UNIQUE = "unique"
    AMBIGUOUS = "ambiguous"
    FAILED = "failed"


@dataclass(frozen=True)
class Candidate:
    """One way to read a contested reference."""

    slot: str  # which reference is contested, e.g. "vehicles" or "zone"
    vehicle_ids: tuple[str, ...] = ()
    label: str = ""
    query: str = ""  # the text that was typed, for label substitution
    score: float = 0.0

    def describe(self) -> str:
        if self.vehicle_ids:
            return ", ".join(self.vehicle_ids)
        return self.label


@dataclass(frozen=True)
class Interpretation:
    intent: Optional[Intent]
    confidence: Confidence
    vehicle_ids: tuple[str, ...] = ()
    zone_id: Optional[str] = None
    beacon_id: Optional[str] = None
    destination: Optional[Point] = None
    route: tuple[Point, ...] = ()  # explicit route, passed through unplanned
    point: Optional[Point] = None  # place/define position
    zone_params: dict = field(default_factory=dict)
    mode_task: Optional[str] = None
    mode_stage: Optional[str] = None
    mode_id: Optional[str] = None
    labels: tuple[str, ...] = ()  # labels that resolved, for grounding
    missing: tuple[str, ...] = ()
    candidates: tuple[Candidate, ...] = ()
    reason: str = ""

    def __post_init__(self) -> None:
        if self.confidence is Confidence.FAILED and (self.vehicle_ids or self.zone_id):
            raise ValueError("failed interpretations carry no referents")


def _failed(intent: Optional[Intent], reason: str) -> Interpretation:
    return Interpretation(intent, Confidence.FAILED, reason=reason)


def _ambiguous(intent: Intent, candidates: list[Candidate], reason: str) -> Interpretation:
    return Interpretation(
        intent, Confidence.AMBIGUOUS, candidates=tuple(candidates), reason=reason
    )


def _recency_bonus(ctx: DialogueContext, *, vehicle_id: str = "", label: str = "") -> float:
    for record in ctx.recent_grounding():
        if record.resolution == "abandoned":
            continue
        if vehicle_id and vehicle_id in record.vehicle_ids:
            return 1.0
        if label and label.lower() in (l.lower() for l in record.labels):
            return 1.0
    return 0.0


def score_vehicles(ctx: DialogueContext, anchor: Optional[Point]) -> list[tuple[str, float]]:
    """Rank vehicles for count-based selection; higher is better.

    Proximity to the anchor (the command's destination) dominates; prior
    grounding involvement breaks near-ties. Scores are normalized to [0, 1]
    over the components that apply, so the dominance margin is meaningful.
    Ties fall back to the vehicle id.
    """
    scoring = ctx.scoring
    denom = scoring.w_proximity + scoring.w_recency
    ranked = []
    for vid, vehicle in ctx.vehicles.items():
        if anchor is None:
            proximity = 0.0
        else:
            dist = math.hypot(vehicle.x - anchor[0], vehicle.y - anchor[1])
            proximity = 1.0 / (1.0 + dist / scoring.proximity_scale)
        score = (
            scoring.w_proximity * proximity
            + scoring.w_recency * _recency_bonus(ctx, vehicle_id=vid)
        ) / denom
        ranked.append((vid, score))
    ranked.sort(key=lambda pair: (-pair[1], pair[0]))
    return ranked


def _resolve_count_vehicles(
    intent: Intent,
    count: int,
    anchor: Optional[Point],
    ctx: DialogueContext,
    strategy: InterpStrategy,
) -> Interpretation | tuple[str, ...]:
    ranked = score_vehicles(ctx, anchor)
    if len(ranked) < count:
        return _failed(intent, f"only {len(ranked)} vehicles available, {count} requested")
    chosen = tuple(vid for vid, _ in ranked[:count])
    if len(ranked) == count:
        return chosen
    candidates = [
        Candidate("vehicles", vehicle_ids=chosen, score=ranked[count - 1][1]),
        Candidate(
            "vehicles",
            vehicle_ids=tuple(list(chosen[:-1]) + [ranked[count][0]]),
            score=ranked[count][1],
        ),
    ]
    if strategy is InterpStrategy.STRICT_CONFIRM:
        return _ambiguous(intent, candidates, f"which {count} vehicles")
    if strategy is InterpStrategy.CONTEXT_RANK:
        if ranked[count - 1][1] - ranked[count][1] < ctx.scoring.dominance_margin:
            return _ambiguous(intent, candidates, f"no clear {count}-vehicle choice")
    return chosen


def _resolve_targets(
    intent: Intent,
    parsed: ParsedCommand,
    anchor: Optional[Point],
    ctx: DialogueContext,
    strategy: InterpStrategy,
) -> Interpretation | tuple[str, ...]:
    targets = parsed.targets
    assert targets is not None
    if targets.vehicle_ids:
        unknown = [vid for vid in targets.vehicle_ids if vid not in ctx.vehicles]
        if unknown:
            return _failed(intent, f"unknown vehicle: {', '.join(unknown)}")
        return targets.vehicle_ids
    if targets.anaphor:
        for record in reversed(ctx.grounding):
            if record.resolution != "abandoned" and record.vehicle_ids:
                alive = tuple(v for v in record.vehicle_ids if v in ctx.vehicles)
                if alive:
                    return alive
        return _failed(intent, "'them' has no antecedent")
    assert targets.count is not None
    return _resolve_count_vehicles(intent, targets.count, anchor, ctx, strategy)


def _label_matches(label: str, known: list[str]) -> list[str]:
    label = label.lower()
    exact = [k for k in known if k.lower() == label]
    if exact:
        return exact
    return [k for k in known if k.lower().startswith(label)]


def _resolve_zone(
    intent: Intent, label: str, ctx: DialogueContext, strategy: InterpStrategy
) -> Interpretation | str:
    """Zone label -> zone id, or an Ambiguous/Failed interpretation."""
    known = {z.label: z.id for z in ctx.zones.values()}
    resolved = _resolve_label(intent, "zone", label, list(known), ctx, strategy)
    if isinstance(resolved, Interpretation):
        return resolved
    return known[resolved]


def _resolve_beacon(
    intent: Intent, label: str, ctx: DialogueContext, strategy: InterpStrategy
) -> Interpretation | str:
    known = [b.label for b in ctx.beacons.all()]
    resolved = _resolve_label(intent, "beacon", label, known, ctx, strategy)
    if isinstance(resolved, Interpretation):
        return resolved
    return ctx.beacons.by_label(resolved).id


def _resolve_label(
    intent: Intent,
    slot: str,
    label: str,
    known: list[str],
    ctx: DialogueContext,
    strategy: InterpStrategy,
) -> Interpretation | str:
    """Shared label matching: exact wins; prefixes rank by grounding recency."""
    matches = _label_matches(label, known)
    if not matches:
        return _failed(intent, f"no {slot} matches {label!r}")
    if len(matches) == 1:
        exact = matches[0].lower() == label.lower()
        if exact or strategy is not InterpStrategy.STRICT_CONFIRM:
            return matches[0]
        return _ambiguous(
            intent,
            [Candidate(slot, label=matches[0], query=label, score=0.7)],
            f"confirm {slot} {matches[0]!r}",
        )
    denom = ctx.scoring.w_label + ctx.scoring.w_recency
    scored = sorted(
        (
            Candidate(
                slot,
                label=m,
                query=label,
                score=(
                    0.7 * ctx.scoring.w_label
                    + ctx.scoring.w_recency * _recency_bonus(ctx, label=m)
                )
                / denom,
            )
            for m in matches
        ),
        key=lambda c: (-c.score, c.label),
    )
    if strategy is InterpStrategy.AUTO_RESOLVE:
        return scored[0].label
    if (
        strategy is InterpStrategy.CONTEXT_RANK
        and scored[0].score - scored[1].score >= ctx.scoring.dominance_margin
    ):
        return scored[0].label
    return _ambiguous(intent, list(scored), f"{slot} {label!r} is ambiguous")


def _resolve_deixis(utt: OperatorUtterance, ctx: DialogueContext) -> Optional[Point]:
    """'there': the gesture point, else the latest recent alarm, else the
    most recent grounded location."""
    if utt.gesture is not None:
        return utt.gesture.point()
    alarm = ctx.recent_alarm()
    if alarm is not None:
        return (alarm.x, alarm.y)
    for record in reversed(ctx.grounding):
        if record.resolution != "abandoned" and record.location is not None:
            return record.location
    return None


def interpret(
    utt: OperatorUtterance, ctx: DialogueContext, strategy: InterpStrategy
) -> Interpretation:
    """Parse and ground one utterance; total function, never raises on input."""
    try:
        parsed = grammar.parse(utt.text)
    except grammar.ParseError as exc:
        return _failed(None, str(exc))

    intent = parsed.intent
    if intent is Intent.PLACE_BEACON:
        point = parsed.point
        if point is None and utt.gesture is not None:
            point = utt.gesture.point()
        missing = () if point is not None else ("position",)
        return Interpretation(
            intent, Confidence.UNIQUE, point=point,
            labels=(parsed.beacon_label,), missing=missing,
        )

    if intent is Intent.DEFINE_ZONE:
        params = dict(parsed.zone_params)
        point = parsed.point
        if utt.gesture is not None and utt.gesture.kind == "drag":
            if point is None:
                point = utt.gesture.point()
            dx = utt.gesture.x2 - utt.gesture.x
            dy = utt.gesture.y2 - utt.gesture.y
            params.setdefault("direction", math.degrees(math.atan2(dy, dx)))
            params.setdefault("range", math.hypot(dx, dy))
        missing = []
        if point is None:
            missing.append("center")
        if "direction" not in params:
            missing.append("direction")
        return Interpretation(
            intent, Confidence.UNIQUE, point=point, zone_params=params,
            labels=(parsed.zone_label,), missing=tuple(missing),
        )

    if intent is Intent.SET_MODE:
        return Interpretation(
            intent, Confidence.UNIQUE,
            mode_task=parsed.mode_task, mode_stage=parsed.mode_stage, mode_id=parsed.mode_id,
        )

    if intent is Intent.QUERY_STATUS:
        if parsed.targets is None:
            return Interpretation(intent, Confidence.UNIQUE)
        resolved = _resolve_targets(intent, parsed, None, ctx, strategy)
        if isinstance(resolved, Interpretation):
            return resolved
        return Interpretation(intent, Confidence.UNIQUE, vehicle_ids=resolved)

    if intent is Intent.PURSUE:
        if parsed.zone_label is None:
            anchor = None
            zone_id = None
            labels: tuple[str, ...] = ()
            missing: tuple[str, ...] = ("zone",)
        else:
            zone = _resolve_zone(intent, parsed.zone_label, ctx, strategy)
            if isinstance(zone, Interpretation):
                return zone
            zone_id = zone
            resolved_zone = ctx.zones[zone_id]
            anchor = (resolved_zone.cx, resolved_zone.cy)
            labels = (resolved_zone.label,)
            missing = ()
        targets = _resolve_targets(intent, parsed, anchor, ctx, strategy)
        if isinstance(targets, Interpretation):
            if targets.confidence is Confidence.AMBIGUOUS:
                return replace(targets, zone_id=zone_id, labels=labels, missing=missing)
            return targets
        return Interpretation(
            intent, Confidence.UNIQUE, vehicle_ids=targets, zone_id=zone_id,
            labels=labels, missing=missing,
        )

    if intent is Intent.DISPATCH:
        dest = parsed.destination
        anchor: Optional[Point] = None
        beacon_id = None
        zone_id = None
        destination: Optional[Point] = None
        labels = ()
        missing = ()
        if dest is None:
            missing = ("destination",)
        elif dest.kind == "coords":
            destination = anchor = dest.point
        elif dest.kind == "deixis":
            destination = anchor = _resolve_deixis(utt, ctx)
            if destination is None:
                return _failed(intent, "'there' has no referent in context")
        elif dest.kind == "beacon":
            beacon = _resolve_beacon(intent, dest.label, ctx, strategy)
            if isinstance(beacon, Interpretation):
                return beacon
            beacon_id = beacon
            resolved = ctx.beacons.by_id(beacon_id)
            destination = anchor = (resolved.x, resolved.y)
            labels = (resolved.label,)
        elif dest.kind == "zone":
            zone = _resolve_zone(intent, dest.label, ctx, strategy)
            if isinstance(zone, Interpretation):
                return zone
            zone_id = zone
            resolved = ctx.zones[zone_id]
            destination = anchor = (resolved.cx, resolved.cy)
            labels = (resolved.label,)
        targets = _resolve_targets(intent, parsed, anchor, ctx, strategy)
        if isinstance(targets, Interpretation):
            if targets.confidence is Confidence.AMBIGUOUS:
                return replace(
                    targets, beacon_id=beacon_id, zone_id=zone_id,
                    destination=destination, labels=labels, missing=missing,
                )
            return targets
        return Interpretation(
            intent, Confidence.UNIQUE, vehicle_ids=targets,
            beacon_id=beacon_id, zone_id=zone_id, destination=destination,
            labels=labels, missing=missing,
        )

    return _failed(intent, f"unhandled intent {intent}")  # pragma: no cover


def with_choice(interp: Interpretation, candidate: Candidate) -> Interpretation:
    """Collapse an Ambiguous interpretation onto one chosen candidate."""
    if candidate.slot == "vehicles":
        return replace(
            interp, confidence=Confidence.UNIQUE,
            vehicle_ids=candidate.vehicle_ids, candidates=(), reason="",
        )
    raise ValueError(f"cannot apply a choice for slot {candidate.slot!r}")
