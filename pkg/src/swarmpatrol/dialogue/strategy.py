"""Workload-adaptive strategy selection and emission gating.

At low mission workload the interface leans on the operator: it confirms
everything and speaks verbosely, which builds grounding and keeps the
operator engaged. As workload climbs it resolves references itself and goes
terse, down to critical-only traffic. Critical messages are never gated,
whatever the level.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from typing import Optional

from swarmpatrol.dialogue.interpret import InterpStrategy
from swarmpatrol.workload import WorkloadState


class GenStrategy(str, enum.Enum):
    VERBOSE = "verbose"
    STANDARD = "standard"
    TERSE_CRITICAL = "terse_critical"


class Severity(str, enum.Enum):
    INFO = "info"
    WARNING = "warning"
    CRITICAL = "critical"


INTERP_BURDEN = {
    InterpStrategy.STRICT_CONFIRM: 3,
    InterpStrategy.CONTEXT_RANK: 2,
    InterpStrategy.AUTO_RESOLVE: 1,
}
GEN_BURDEN = {
    GenStrategy.VERBOSE: 3,
    GenStrategy.STANDARD: 2,
    GenStrategy.TERSE_CRITICAL: 1,
}


@dataclass(frozen=True)
class StrategyPair:
    interpretation: InterpStrategy
    generation: GenStrategy

    @property
    def burden(self) -> int:
        return INTERP_BURDEN[self.interpretation] + GEN_BURDEN[self.generation]


@dataclass(frozen=True)
class StrategyPolicy:
    """One strategy pair per workload level 1..4; burden must not rise."""

    levels: tuple[StrategyPair, StrategyPair, StrategyPair, StrategyPair]

    def __post_init__(self) -> None:
        burdens = [pair.burden for pair in self.levels]
        if any(b2 > b1 for b1, b2 in zip(burdens, burdens[1:])):
            raise ValueError(f"operator burden must be non-increasing across levels, got {burdens}")

    def for_level(self, level: int) -> StrategyPair:
        if level not in (1, 2, 3, 4):
            raise ValueError(f"workload level must be 1..4, got {level}")
        return self.levels[level - 1]


def default_policy() -> StrategyPolicy:
    return StrategyPolicy(
        (
            StrategyPair(InterpStrategy.STRICT_CONFIRM, GenStrategy.VERBOSE),
            StrategyPair(InterpStrategy.CONTEXT_RANK, GenStrategy.STANDARD),
            StrategyPair(InterpStrategy.CONTEXT_RANK, GenStrategy.STANDARD),
            StrategyPair(InterpStrategy.AUTO_RESOLVE, GenStrategy.TERSE_CRITICAL),
        )
    )


def select_strategy(workload: WorkloadState, policy: StrategyPolicy) -> StrategyPair:
    """The policy row for the current discrete workload level."""
    return policy.for_level(workload.discrete_level)


@dataclass(frozen=True)
class Emission:
    """A system-originated message heading for the operator."""

    text: str
    severity: Severity
    confirmation: bool = False  # acknowledgement/echo of an operator command
    kind: str = "notice"
    cid: Optional[str] = None


@dataclass(frozen=True)
class EmissionDecision:
    emission: Emission
    emit: bool
    reason: str


def decide_emission(emission: Emission, strategy: GenStrategy) -> EmissionDecision:
    """Send-or-suppress per generation strategy; criticals always go out."""
    if emission.severity is Severity.CRITICAL:
        return EmissionDecision(emission, True, "critical floor")
    if strategy is GenStrategy.VERBOSE:
        return EmissionDecision(emission, True, "verbose emits everything")
    if strategy is GenStrategy.STANDARD:
        if emission.confirmation and emission.severity is Severity.INFO:
            return EmissionDecision(emission, False, "info confirmations suppressed")
        return EmissionDecision(emission, True, "standard")
    # terse: only warnings/criticals, and no confirmations at all
    if emission.severity is Severity.WARNING and not emission.confirmation:
        return EmissionDecision(emission, True, "warning passes terse gate")
    return EmissionDecision(emission, False, "terse gate")
