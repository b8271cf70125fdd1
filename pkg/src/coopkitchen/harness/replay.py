"""Log verification: re-simulate recorded actions and compare state digests."""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path

from ..env.config import GameConfig
from ..env.layout import parse_layout
from ..env.orders import OrderSchedule, spawn_orders
from ..env.state import Action, build_initial_state, state_hash, step
from ..errors import ReplayError
from ..metrics import EpisodeLog, load_episode_log


@dataclass
class ReplayResult:
    verified: bool
    ticks_checked: int
    divergence_tick: int | None = None
    expected_hash: str | None = None
    actual_hash: str | None = None
    final_score: int | None = None
    recorded_score: int | None = None

    def summary(self) -> str:
        if self.verified:
            return f"verified: {self.ticks_checked} ticks, final score {self.final_score}"
        return (
            f"divergence at tick {self.divergence_tick}: "
            f"expected {self.expected_hash[:12]}..., got {self.actual_hash[:12]}..."
        )


def replay(log: EpisodeLog) -> ReplayResult:
    """Re-simulate from the embedded fingerprint and recorded action streams."""
    header = log.header
    if "layout_text" not in header or "game_config" not in header:
        raise ReplayError("log is missing its fingerprint (layout/config/seed)")
    layout = parse_layout(header["layout_text"])
    config = GameConfig.from_dict(header["game_config"])
    players = header.get("players", 2)

    state = build_initial_state(layout, config, players=players)
    schedule = OrderSchedule.from_config(config)
    state = spawn_orders(state, schedule)

    for record in log.ticks:
        actions = [Action(a) for a in record.actions]
        state, _events = step(state, actions)
        state = spawn_orders(state, schedule)
        digest = state_hash(state)
        if digest != record.state_hash:
            return ReplayResult(
                verified=False,
                ticks_checked=record.tick,
                divergence_tick=record.tick,
                expected_hash=record.state_hash,
                actual_hash=digest,
            )

    recorded = log.final_score
    if log.ticks and recorded != state.score:
        return ReplayResult(
            verified=False,
            ticks_checked=len(log.ticks),
            divergence_tick=log.ticks[-1].tick,
            expected_hash=str(recorded),
            actual_hash=str(state.score),
        )
    return ReplayResult(
        verified=True,
        ticks_checked=len(log.ticks),
        final_score=state.score,
        recorded_score=recorded,
    )


def replay_log_file(path: str | Path) -> ReplayResult:
    return replay(load_episode_log(path))


def human_action_stream(log: EpisodeLog, seat: int) -> list[str]:
    """Extract one seat's recorded actions (e.g. the human player's)."""
    return [record.actions[seat] for record in log.ticks if seat < len(record.actions)]
