"""Agent construction from harness/server configuration."""

from __future__ import annotations

from ..errors import ConfigError
from ..system2 import Backend, NullBackend, System2Config
from .baselines import ActAgent
from .dpt import DptAgent
from .partners import HumanProxy, RulePartner

AGENT_KINDS = (
    "fsm",
    "dpt",
    "dpt-no-tom",
    "act",
    "react",
    "reflexion",
    "rule:beef",
    "rule:lettuce",
    "rule:assembler",
    "human",
)


def build_agent(
    kind: str,
    player: int,
    *,
    backend: Backend | None = None,
    s2_config: System2Config | None = None,
    tick_period: float = 0.25,
):
    """Wire an agent instance for one seat.

    Backend-driven kinds require a backend; a null backend degrades them
    to pure FSM behavior, which is the ablation identity.
    """
    if kind == "fsm":
        return DptAgent(player, backend=None)
    if kind in ("dpt", "dpt-no-tom", "react", "reflexion"):
        return DptAgent(
            player,
            backend=backend or NullBackend(),
            framework="dpt" if kind.startswith("dpt") else kind,
            include_tom=(kind == "dpt"),
            s2_config=s2_config,
        )
    if kind == "act":
        return ActAgent(player, backend=backend or NullBackend(), tick_period=tick_period)
    if kind.startswith("rule:"):
        return RulePartner(player, kind.split(":", 1)[1])
    if kind == "human":
        return HumanProxy(player)
    raise ConfigError(f"unknown agent kind {kind!r} (choose from {AGENT_KINDS})")
