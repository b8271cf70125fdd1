"""Experiment configuration: one declarative file plus CLI overrides.

Documented keys (YAML or JSON):

    layout: builtin name or path          mode: fast | realtime
    horizon: ticks (default 500)          tick_period: seconds (default 0.25)
    seed: int                             runs: repetitions (default 20)
    agents: [kind, kind?]                 backend: null | scripted:FILE | http
    out_dir: output directory             game: {cook_ticks, overcook_ticks,
    base_url/model: http backend          chop_interacts, extinguish_interacts,
                                          order_interval, order_lifetime,
                                          order_cap, order_weights,
                                          order_arrivals}
"""

from __future__ import annotations

from dataclasses import dataclass, field, asdict
from pathlib import Path

import yaml

from ..agents.factory import AGENT_KINDS
from ..env.config import GameConfig
from ..env.layout import Layout, builtin_layout_path, load_layout
from ..errors import ConfigError


@dataclass
class ExperimentConfig:
    layout: str = "new_counter_circuit"
    horizon: int = 500
    tick_period: float = 0.25
    mode: str = "fast"  # fast | realtime
    agents: list[str] = field(default_factory=lambda: ["fsm"])
    backend: str = "null"
    base_url: str | None = None
    model: str | None = None
    seed: int = 0
    runs: int = 20
    out_dir: str | None = None
    game: dict = field(default_factory=dict)
    generate_every: int = 40
    tom_every: int = 100
    reflect_every: int = 100
    include_decisions: bool = True

    def validate(self) -> None:
        if self.mode not in ("fast", "realtime"):
            raise ConfigError(f"mode must be fast or realtime, got {self.mode!r}")
        if not 1 <= len(self.agents) <= 2:
            raise ConfigError("one or two agents required")
        for kind in self.agents:
            if kind not in AGENT_KINDS:
                raise ConfigError(f"unknown agent kind {kind!r}")
        if self.horizon <= 0 or self.runs <= 0:
            raise ConfigError("horizon and runs must be positive")
        self.game_config()  # raises on bad game keys

    def layout_path(self) -> Path:
        candidate = Path(self.layout)
        if candidate.exists():
            return candidate
        try:
            return builtin_layout_path(self.layout)
        except FileNotFoundError:
            raise ConfigError(f"layout not found: {self.layout}") from None

    def load_layout(self) -> Layout:
        return load_layout(self.layout_path())

    def game_config(self, seed: int | None = None) -> GameConfig:
        data = dict(self.game)
        data.setdefault("horizon", self.horizon)
        data.setdefault("tick_period", self.tick_period)
        data["seed"] = self.seed if seed is None else seed
        return GameConfig.from_dict(data)

    def to_dict(self) -> dict:
        return asdict(self)

    @classmethod
    def from_dict(cls, data: dict) -> "ExperimentConfig":
        known = set(cls.__dataclass_fields__)
        extra = set(data) - known
        if extra:
            raise ConfigError(f"unknown config keys: {sorted(extra)}")
        cfg = cls(**data)
        cfg.validate()
        return cfg

    @classmethod
    def from_file(cls, path: str | Path) -> "ExperimentConfig":
        raw = Path(path).read_text(encoding="utf-8")
        data = yaml.safe_load(raw)
        if not isinstance(data, dict):
            raise ConfigError(f"config file {path} must hold a mapping")
        return cls.from_dict(data)
