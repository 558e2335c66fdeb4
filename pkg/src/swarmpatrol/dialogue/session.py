"""The per-operator dialogue state machine.

One utterance at a time: interpret under the strategy chosen for the
workload level at arrival, convert, and either hand back an executable plan
or open a clarification exchange. An open exchange keeps its opening
strategy until it resolves; a new utterance abandons it. Every settled
exchange lands in the grounding store, which future interpretation reads.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from typing import Optional

from swarmpatrol.dialogue.context import DialogueContext, GroundingRecord, OperatorUtterance
from swarmpatrol.dialogue.convert import (
    CompletionRequest,
    ConversionError,
    ExecutablePlan,
    SlotSpec,
    convert,
)
from swarmpatrol.dialogue.grammar import Intent
from swarmpatrol.dialogue.interpret import (
    Candidate,
    Confidence,
    Interpretation,
    interpret,
    with_choice,
)
from swarmpatrol.dialogue.strategy import (
    Emission,
    Severity,
    StrategyPair,
    StrategyPolicy,
    default_policy,
    select_strategy,
)
from swarmpatrol.workload import WorkloadState


@dataclass
class PendingExchange:
    utterance: OperatorUtterance
    interpretation: Interpretation
    strategy: StrategyPair
    request: CompletionRequest
    rounds: int = 0


@dataclass
class SessionResult:
    """What one dialogue turn produced; the runtime routes the pieces."""

    emissions: list[Emission] = field(default_factory=list)
    request: Optional[CompletionRequest] = None
    plan: Optional[ExecutablePlan] = None
    record: Optional[GroundingRecord] = None
    strategy: Optional[StrategyPair] = None


class DialogueSession:
    def __init__(self, policy: StrategyPolicy | None = None) -> None:
        self.policy = policy or default_policy()
        self.grounding: list[GroundingRecord] = []
        self.pending: Optional[PendingExchange] = None

    # -- helpers -------------------------------------------------------------

    def _close(
        self,
        utt: OperatorUtterance,
        interp: Interpretation,
        strategy: StrategyPair,
        resolution: str,
        rounds: int,
        tick: int,
    ) -> GroundingRecord:
        record = GroundingRecord(
            tick=tick,
            text=utt.text,
            intent=interp.intent.value if interp.intent else None,
            resolution=resolution,
            rounds=rounds,
            strategy=strategy.interpretation.value,
            vehicle_ids=interp.vehicle_ids,
            labels=interp.labels,
            location=interp.destination or interp.point,
        )
        self.grounding.append(record)
        return record

    def abandon_pending(self, tick: int, why: str = "superseded") -> Optional[GroundingRecord]:
        if self.pending is None:
            return None
        pending, self.pending = self.pending, None
        return self._close(
            pending.utterance, pending.interpretation, pending.strategy,
            "abandoned", pending.rounds, tick,
        )

    def _finish(
        self,
        utt: OperatorUtterance,
        interp: Interpretation,
        strategy: StrategyPair,
        ctx: DialogueContext,
        rounds: int,
    ) -> SessionResult:
        """Convert a unique interpretation, opening a clarification if needed."""
        try:
            outcome = convert(interp, ctx)
        except ConversionError as exc:
            record = self._close(utt, interp, strategy, "abandoned", rounds, ctx.now)
            return SessionResult(
                emissions=[Emission(f"cannot execute: {exc}", Severity.WARNING, cid=utt.cid)],
                record=record,
                strategy=strategy,
            )
        if isinstance(outcome, CompletionRequest):
            self.pending = PendingExchange(utt, interp, strategy, outcome, rounds)
            return SessionResult(request=outcome, strategy=strategy)
        resolution = "clarified" if rounds else "executed"
        record = self._close(utt, interp, strategy, resolution, rounds, ctx.now)
        ack = Emission(
            f"roger: {outcome.echo}", Severity.INFO, confirmation=True, kind="ack", cid=utt.cid
        )
        return SessionResult(emissions=[ack], plan=outcome, record=record, strategy=strategy)

    # -- entry points ----------------------------------------------------------

    def handle_utterance(
        self, utt: OperatorUtterance, ctx: DialogueContext, workload: WorkloadState
    ) -> SessionResult:
        """Interpret a fresh utterance; any open exchange is abandoned."""
        abandoned = self.abandon_pending(ctx.now)
        strategy = select_strategy(workload, self.policy)
        interp = interpret(utt, ctx, strategy.interpretation)

        if interp.confidence is Confidence.FAILED:
            record = self._close(utt, interp, strategy, "abandoned", 0, ctx.now)
            result = SessionResult(
                emissions=[
                    Emission(
                        f"did not understand: {interp.reason}",
                        Severity.WARNING,
                        kind="non_understanding",
                        cid=utt.cid,
                    )
                ],
                record=record,
                strategy=strategy,
            )
            return result

        if interp.confidence is Confidence.AMBIGUOUS:
            slot = interp.candidates[0].slot
            request = CompletionRequest(
                slots=(
                    _choice_slot(slot, interp.candidates),
                ),
                intent=interp.intent,
                note=interp.reason,
            )
            self.pending = PendingExchange(utt, interp, strategy, request, 0)
            return SessionResult(request=request, strategy=strategy)

        result = self._finish(utt, interp, strategy, ctx, rounds=0)
        if abandoned is not None:
            result.emissions.insert(
                0,
                Emission("previous exchange abandoned", Severity.INFO, kind="notice", cid=utt.cid),
            )
        return result

    def handle_completion(self, values: dict, ctx: DialogueContext) -> SessionResult:
        """Apply operator-supplied slot values to the open exchange."""
        if self.pending is None:
            return SessionResult(
                emissions=[
                    Emission("no completion pending", Severity.WARNING, kind="protocol_error")
                ]
            )
        pending = self.pending
        self.pending = None
        rounds = pending.rounds + 1
        interp = pending.interpretation

        if interp.confidence is Confidence.AMBIGUOUS:
            choice = _pick_choice(values, pending.request, interp.candidates)
            if choice is None:
                self.pending = pending
                return SessionResult(
                    emissions=[
                        Emission("completion did not name a valid choice", Severity.WARNING,
                                 kind="protocol_error")
                    ],
                    request=pending.request,
                )
            if choice.slot == "vehicles":
                interp = with_choice(interp, choice)
            else:
                # Re-read the utterance with the chosen label spelled out.
                patched_text = pending.utterance.text.lower().replace(
                    f"{choice.slot} {choice.query}", f"{choice.slot} {choice.label}", 1
                )
                patched = replace(pending.utterance, text=patched_text)
                interp = interpret(patched, ctx, pending.strategy.interpretation)
                if interp.confidence is not Confidence.UNIQUE:
                    record = self._close(
                        pending.utterance, pending.interpretation, pending.strategy,
                        "abandoned", rounds, ctx.now,
                    )
                    return SessionResult(
                        emissions=[
                            Emission(
                                f"still cannot ground the command: {interp.reason}",
                                Severity.WARNING, kind="non_understanding",
                            )
                        ],
                        record=record,
                    )
            pending = PendingExchange(pending.utterance, interp, pending.strategy,
                                      pending.request, rounds)
            return self._finish(pending.utterance, interp, pending.strategy, ctx, rounds)

        interp = _merge_slots(interp, values)
        return self._finish(pending.utterance, interp, pending.strategy, ctx, rounds)


def _choice_slot(slot: str, candidates: tuple[Candidate, ...]) -> SlotSpec:
    return SlotSpec(
        name="choice",
        kind="choice",
        prompt=f"which {slot}?",
        choices=tuple(c.describe() for c in candidates),
    )


def _pick_choice(
    values: dict, request: CompletionRequest, candidates: tuple[Candidate, ...]
) -> Optional[Candidate]:
    if "choice" not in values:
        return None
    raw = values["choice"]
    if isinstance(raw, int):
        if 0 <= raw < len(candidates):
            return candidates[raw]
        return None
    label = str(raw).strip().lower()
    for candidate in candidates:
        if candidate.describe().lower() == label:
            return candidate
    return None


def _merge_slots(interp: Interpretation, values: dict) -> Interpretation:
    """Fold completion values into the interpretation and clear filled slots."""
    changes: dict = {}
    filled = set()
    for name, value in values.items():
        if name == "destination":
            changes["destination"] = (float(value[0]), float(value[1]))
            filled.add("destination")
        elif name in ("position", "center"):
            changes["point"] = (float(value[0]), float(value[1]))
            filled.add(name)
        elif name == "direction":
            params = dict(interp.zone_params)
            params["direction"] = float(value)
            changes["zone_params"] = params
            filled.add("direction")
        elif name == "waypoints":
            changes["route"] = tuple((float(x), float(y)) for x, y in value)
            filled.add("destination")
        elif name == "zone":
            changes["zone_id"] = str(value)
            filled.add("zone")
    changes["missing"] = tuple(m for m in interp.missing if m not in filled)
    return replace(interp, **changes)
