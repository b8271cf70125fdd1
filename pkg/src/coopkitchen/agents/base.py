"""Agent protocol shared by the harness, the server, and tests."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Protocol, runtime_checkable

from ..env.state import Action, GameEvent, GameState


@dataclass
class TickContext:
    """Post-step observation handed to agents after every tick."""

    state: GameState
    actions: tuple[Action, ...]
    events: list[GameEvent]


@runtime_checkable
class Agent(Protocol):
    player: int

    def tick(self, state: GameState) -> Action:
        """One atomic action for the current tick. Must never block."""
        ...

    def observe(self, ctx: TickContext) -> None:
        """Consume the outcome of the tick that just resolved."""
        ...

    def close(self) -> None: ...


@dataclass
class AgentStats:
    """Common bookkeeping every concrete agent carries."""

    backend_calls: list = field(default_factory=list)
    macro_records: list = field(default_factory=list)
    task_swaps: list = field(default_factory=list)
    decision_trace: list = field(default_factory=list)
