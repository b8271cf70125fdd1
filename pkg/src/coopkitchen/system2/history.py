"""Bounded game-history buffer rendered into prompt text.

Records are immutable per-tick digests; rendering samples interesting
scenes (event ticks plus a periodic cadence) and is deterministic for a
given buffer content.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field

from ..env.document import StateDocument
from ..env.items import OBJECT_CATALOG

DEFAULT_CAPACITY = 600
SCENE_EVERY = 10  # periodic sampling cadence (ticks)
MAX_SCENES = 12  # newest scenes kept in a rendering


@dataclass(frozen=True)
class TickRecord:
    tick: int
    remaining: int
    score: int
    document: StateDocument
    actions: tuple[str, ...]
    reward_delta: int = 0
    deliveries: tuple[str, ...] = ()
    missed: tuple[str, ...] = ()

    @property
    def interesting(self) -> bool:
        return bool(self.deliveries or self.missed or self.reward_delta)


def compact_document(doc: StateDocument) -> str:
    """One-line literal with zero counts elided (keeps prompts small)."""
    objects = ", ".join(
        f'("{n}", "{s}"): {doc.objects[(n, s)]}'
        for (n, s) in OBJECT_CATALOG
        if doc.objects.get((n, s), 0)
    )
    orders = ", ".join(
        "{" + f'"name": "{o["name"]}", "remain_time": {o["remain_time"]}' + "}"
        for o in doc.orders
    )
    inventory = ", ".join(
        f'"{p}": ("{n}", "{s}")' for p, (n, s) in doc.inventory_other_player.items()
    )
    return (
        "{"
        + f'"objects": {{{objects}}}, '
        + f'"counters": {{"Empty": {doc.counters.get("Empty", 0)}}}, '
        + f'"orders": [{orders}], '
        + f'"inventory_other_player": {{{inventory}}}'
        + "}"
    )


@dataclass
class TrajectoryBuffer:
    capacity: int = DEFAULT_CAPACITY
    agent_player: int = 0
    entries: deque = field(default_factory=deque)

    def __post_init__(self):
        self.entries = deque(self.entries, maxlen=self.capacity)

    def record(self, record: TickRecord) -> None:
        self.entries.append(record)

    def __len__(self) -> int:
        return len(self.entries)

    @property
    def end_tick(self) -> int:
        return self.entries[-1].tick if self.entries else -1

    def snapshot(self) -> list[TickRecord]:
        """Immutable copy safe to hand to a worker thread."""
        return list(self.entries)

    def window(self, ticks: int) -> list[TickRecord]:
        """Records from the last ``ticks`` ticks."""
        if not self.entries:
            return []
        cutoff = self.entries[-1].tick - ticks
        return [r for r in self.entries if r.tick > cutoff]


def render_scene(record: TickRecord, agent_player: int) -> str:
    labels = []
    for idx, action in enumerate(record.actions):
        who = "agent" if idx == agent_player else "human"
        labels.append(f"{who}: {action}")
    delivery = ", ".join(record.deliveries) if record.deliveries else "(none)"
    missed = ", ".join(record.missed) if record.missed else "(none)"
    return "\n".join(
        [
            f"- Remained Timestep: {record.remaining}",
            f"  Score: {record.score}",
            f"  Game State: {compact_document(record.document)}",
            f"  Action: {', '.join(labels)}",
            f"  Delivery: {delivery}",
            f"  Missed Orders: {missed}",
        ]
    )


def render_history(
    records: list[TickRecord],
    agent_player: int,
    *,
    scene_every: int = SCENE_EVERY,
    max_scenes: int = MAX_SCENES,
) -> str:
    """Sampled scenes: every event tick plus each ``scene_every``-th tick."""
    if not records:
        return "(no history yet)"
    chosen = [
        r for r in records if r.interesting or r.tick % scene_every == 0
    ]
    if records[-1] not in chosen:
        chosen.append(records[-1])
    chosen = chosen[-max_scenes:]
    return "\n".join(render_scene(r, agent_player) for r in chosen)
