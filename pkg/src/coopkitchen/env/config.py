"""Tunable game parameters.

Timer values are expressed in ticks (one tick = ``tick_period`` seconds of
wall-clock time in realtime mode). Defaults: cooking and overcooking each
take 40 ticks (10 s) and chopping takes 3 interacts, giving humans a
reactable margin; orders arrive every 60 ticks with a 240-tick lifetime,
capped at 5 concurrent.
"""

from __future__ import annotations

from dataclasses import dataclass, field, asdict

from ..errors import ConfigError
from .items import BURGER_NAMES


@dataclass
class GameConfig:
    cook_ticks: int = 40
    overcook_ticks: int = 40
    chop_interacts: int = 3
    extinguish_interacts: int = 3
    horizon: int = 500
    tick_period: float = 0.25
    seed: int = 0

    # Order arrival process. ``order_arrivals`` (list of [tick, name]) wins
    # over the periodic process when non-empty.
    order_interval: int = 60
    order_lifetime: int = 240
    order_cap: int = 5
    order_weights: dict[str, float] = field(
        default_factory=lambda: {name: 1.0 for name in BURGER_NAMES}
    )
    order_arrivals: list[tuple[int, str]] = field(default_factory=list)

    def validate(self) -> None:
        if self.horizon <= 0:
            raise ConfigError("horizon must be positive")
        if self.tick_period <= 0:
            raise ConfigError("tick_period must be positive")
        if min(self.cook_ticks, self.overcook_ticks, self.chop_interacts,
               self.extinguish_interacts) <= 0:
            raise ConfigError("timer values must be positive")
        for name in self.order_weights:
            if name not in BURGER_NAMES:
                raise ConfigError(f"unknown order type in weights: {name}")
        for _, name in self.order_arrivals:
            if name not in BURGER_NAMES:
                raise ConfigError(f"unknown order type in arrivals: {name}")

    def to_dict(self) -> dict:
        d = asdict(self)
        d["order_arrivals"] = [list(a) for a in self.order_arrivals]
        return d

    @classmethod
    def from_dict(cls, data: dict) -> "GameConfig":
        known = {f for f in cls.__dataclass_fields__}
        extra = set(data) - known
        if extra:
            raise ConfigError(f"unknown game config keys: {sorted(extra)}")
        cfg = cls(**{k: v for k, v in data.items() if k != "order_arrivals"})
        cfg.order_arrivals = [tuple(a) for a in data.get("order_arrivals", [])]
        cfg.validate()
        return cfg
