"""Order lifecycle: arrival schedules and pending-order bookkeeping."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import TYPE_CHECKING

from .config import GameConfig
from .items import BURGER_VALUES

if TYPE_CHECKING:  # pragma: no cover
    from .state import GameState


@dataclass
class Order:
    uid: int
    name: str
    remain_time: int

    @property
    def value(self) -> int:
        return BURGER_VALUES[self.name]

    def to_dict(self) -> dict:
        return {"uid": self.uid, "name": self.name, "remain_time": self.remain_time}


@dataclass
class OrderSchedule:
    """Arrival process for new orders.

    Explicit ``arrivals`` (tick, name) pairs take precedence; otherwise a
    seeded periodic draw every ``interval`` ticks. Draws consume only the
    game state's RNG so identical seeds give identical order streams.
    """

    interval: int = 60
    lifetime: int = 240
    cap: int = 5
    weights: dict[str, float] = field(default_factory=dict)
    arrivals: list[tuple[int, str]] = field(default_factory=list)

    @classmethod
    def from_config(cls, config: GameConfig) -> "OrderSchedule":
        return cls(
            interval=config.order_interval,
            lifetime=config.order_lifetime,
            cap=config.order_cap,
            weights=dict(config.order_weights),
            arrivals=list(config.order_arrivals),
        )

    def due(self, tick: int) -> bool:
        if self.arrivals:
            return any(t == tick for t, _ in self.arrivals)
        return self.interval > 0 and tick % self.interval == 0


def spawn_orders(state: "GameState", schedule: OrderSchedule) -> "GameState":
    """Append newly arrived orders, respecting the concurrency cap."""
    tick = state.tick
    if schedule.arrivals:
        for t, name in schedule.arrivals:
            if t == tick and len(state.orders) < schedule.cap:
                state.orders.append(
                    Order(uid=state.next_uid(), name=name, remain_time=schedule.lifetime)
                )
        return state

    if schedule.interval > 0 and tick % schedule.interval == 0 and len(state.orders) < schedule.cap:
        names = sorted(schedule.weights) or sorted(BURGER_VALUES)
        weights = [schedule.weights.get(n, 1.0) for n in names]
        name = state.rng.choices(names, weights=weights, k=1)[0]
        state.rng_draws += 1
        state.orders.append(Order(uid=state.next_uid(), name=name, remain_time=schedule.lifetime))
    return state
