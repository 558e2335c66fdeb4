"""Semantic bridge between operator language and vehicle commands."""

from swarmpatrol.dialogue.context import (
    DialogueContext,
    Gesture,
    GroundingRecord,
    OperatorUtterance,
    ScoringParams,
)
from swarmpatrol.dialogue.convert import (
    CompletionRequest,
    ConversionError,
    ExecutablePlan,
    GatewayAction,
    SlotSpec,
    convert,
)
from swarmpatrol.dialogue.grammar import Intent, ParseError, parse
from swarmpatrol.dialogue.interpret import (
    Candidate,
    Confidence,
    InterpStrategy,
    Interpretation,
    interpret,
)
from swarmpatrol.dialogue.session import DialogueSession, SessionResult
from swarmpatrol.dialogue.strategy import (
    Emission,
    EmissionDecision,
    GenStrategy,
    Severity,
    StrategyPair,
    StrategyPolicy,
    decide_emission,
    default_policy,
    select_strategy,
)

__all__ = [
    "Candidate",
    "CompletionRequest",
    "Confidence",
    "ConversionError",
    "DialogueContext",
    "DialogueSession",
    "Emission",
    "EmissionDecision",
    "ExecutablePlan",
    "GatewayAction",
    "GenStrategy",
    "Gesture",
    "GroundingRecord",
    "Intent",
    "InterpStrategy",
    "Interpretation",
    "OperatorUtterance",
    "ParseError",
    "ScoringParams",
    "SessionResult",
    "Severity",
    "SlotSpec",
    "StrategyPair",
    "StrategyPolicy",
    "convert",
    "decide_emission",
    "default_policy",
    "interpret",
    "parse",
    "select_strategy",
]
