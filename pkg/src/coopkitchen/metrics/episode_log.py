"""Episode logs: append-only JSONL with a typed record stream.

A log is replayable on its own: the header embeds the layout text, full
game config, and seed; tick records carry both players' actions and a
state digest. Partial logs (crash, disconnect) replay up to the last
complete tick.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import IO

from ..env.state import GameEvent

PROTOCOL_VERSION = 1


@dataclass
class TickLogRecord:
    tick: int
    actions: list[str]
    events: list[dict]
    score: int
    state_hash: str

    def to_dict(self) -> dict:
        return {
            "type": "tick",
            "tick": self.tick,
            "actions": self.actions,
            "events": self.events,
            "score": self.score,
            "state_hash": self.state_hash,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "TickLogRecord":
        return cls(
            tick=d["tick"],
            actions=list(d["actions"]),
            events=[dict(e) for e in d["events"]],
            score=d["score"],
            state_hash=d["state_hash"],
        )

    def game_events(self) -> list[GameEvent]:
        return [GameEvent.from_dict(e) for e in self.events]


@dataclass
class EpisodeLog:
    header: dict
    ticks: list[TickLogRecord] = field(default_factory=list)
    macros: list[dict] = field(default_factory=list)
    calls: list[dict] = field(default_factory=list)
    swaps: list[dict] = field(default_factory=list)
    decisions: list[dict] = field(default_factory=list)
    jitter: list[float] = field(default_factory=list)
    footer: dict = field(default_factory=dict)

    @property
    def final_score(self) -> int:
        if self.footer:
            return self.footer.get("final_score", 0)
        return self.ticks[-1].score if self.ticks else 0

    @property
    def players(self) -> int:
        return self.header.get("players", 2)

    def iter_events(self):
        for record in self.ticks:
            for event in record.events:
                yield record.tick, event

    # -- serialization -------------------------------------------------------

    def dump(self, fp: IO[str]) -> None:
        fp.write(json.dumps({"type": "header", **self.header}) + "\n")
        for record in self.ticks:
            fp.write(json.dumps(record.to_dict()) + "\n")
        for macro in self.macros:
            fp.write(json.dumps({"type": "macro", **macro}) + "\n")
        for call in self.calls:
            fp.write(json.dumps({"type": "backend_call", **call}) + "\n")
        for swap in self.swaps:
            fp.write(json.dumps({"type": "task_swap", **swap}) + "\n")
        for decision in self.decisions:
            fp.write(json.dumps({"type": "decision", **decision}) + "\n")
        if self.jitter:
            fp.write(json.dumps({"type": "jitter", "samples": self.jitter}) + "\n")
        if self.footer:
            fp.write(json.dumps({"type": "footer", **self.footer}) + "\n")

    def save(self, path: str | Path) -> Path:
        path = Path(path)
        path.parent.mkdir(parents=True, exist_ok=True)
        with path.open("w", encoding="utf-8") as fp:
            self.dump(fp)
        return path


def load_episode_log(path: str | Path) -> EpisodeLog:
    header: dict = {}
    log = EpisodeLog(header=header)
    with Path(path).open("r", encoding="utf-8") as fp:
        for line in fp:
            line = line.strip()
            if not line:
                continue
            record = json.loads(line)
            kind = record.pop("type", None)
            if kind == "header":
                log.header.update(record)
            elif kind == "tick":
                log.ticks.append(TickLogRecord.from_dict(record))
            elif kind == "macro":
                log.macros.append(record)
            elif kind == "backend_call":
                log.calls.append(record)
            elif kind == "task_swap":
                log.swaps.append(record)
            elif kind == "decision":
                log.decisions.append(record)
            elif kind == "jitter":
                log.jitter.extend(record.get("samples", []))
            elif kind == "footer":
                log.footer.update(record)
    return log
