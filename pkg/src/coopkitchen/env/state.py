"""World state and tick dynamics for the kitchen.

One tick resolves in a fixed order: player movement, player interacts (in
player-index order; the lower index wins contended grabs), then timers
(cooking, overcooking/fire, order expiry). Every score change is backed by
exactly one emitted :class:`GameEvent`.

Interaction summary (``interact`` against the faced cell):

* ingredient stations hand out a fresh item to empty hands; handing the
  matching item (or any plate to the plate station) back destroys it
  (the "trash" route used by counter cleaning);
* counters swap items with hands, stack compatible bare ingredients onto
  plates (either side held), and merge plate contents into a compatible
  plate on the counter;
* pans accept fresh beef, let plates collect well-cooked beef, and give
  up cooked beef to empty hands; a burning pan only responds to the
  extinguisher;
* cutboards accept unchopped lettuce, advance chopping one interact at a
  time, and release or plate chopped lettuce;
* the serving area consumes whatever is offered: a plated burger matching
  a pending order scores it, anything else is a wrong serve.
"""

from __future__ import annotations

import hashlib
import json
import math
from dataclasses import dataclass, field
from enum import Enum
from random import Random
from typing import Iterator

from .config import GameConfig
from .items import (
    BEEF,
    BREAD,
    BURGER_INGREDIENTS,
    BURGER_VALUES,
    CHOPPED,
    FIRE_EXTINGUISHER,
    FRESH,
    IN_PROGRESS,
    LETTUCE,
    OVERCOOKED,
    PLATE,
    UNCHOPPED,
    WELL_COOKED,
    Item,
    Plate,
    Unit,
    plateable,
)
from .layout import CellKind, COUNTER_KINDS, Layout, Pos
from .orders import Order

WRONG_SERVE_PENALTY = -10
MISSED_ORDER_PENALTY = -10


class Action(str, Enum):
    UP = "up"
    DOWN = "down"
    LEFT = "left"
    RIGHT = "right"
    INTERACT = "interact"
    NOOP = "noop"


class Direction(str, Enum):
    UP = "up"
    DOWN = "down"
    LEFT = "left"
    RIGHT = "right"

    @property
    def vector(self) -> Pos:
        return _VECTORS[self]


_VECTORS = {
    Direction.UP: (0, -1),
    Direction.DOWN: (0, 1),
    Direction.LEFT: (-1, 0),
    Direction.RIGHT: (1, 0),
}

MOVE_ACTIONS = {
    Action.UP: Direction.UP,
    Action.DOWN: Direction.DOWN,
    Action.LEFT: Direction.LEFT,
    Action.RIGHT: Direction.RIGHT,
}

# Key actions attributed per served burger (non-repeatable milestones).
KEY_COOK_BEEF = "Cook Beef"
KEY_USE_BEEF = "Use Beef"
KEY_PREPARE_LETTUCE = "Prepare Lettuce"
KEY_USE_LETTUCE = "Use Lettuce"
KEY_USE_BREAD = "Use Bread"
KEY_USE_PLATE = "Use Plate"
KEY_SERVE = "Serve"

KEY_EVENTS_BY_BURGER = {
    "BeefBurger": (KEY_COOK_BEEF, KEY_USE_BEEF, KEY_USE_BREAD, KEY_USE_PLATE, KEY_SERVE),
    "LettuceBurger": (
        KEY_PREPARE_LETTUCE,
        KEY_USE_LETTUCE,
        KEY_USE_BREAD,
        KEY_USE_PLATE,
        KEY_SERVE,
    ),
    "BeefLettuceBurger": (
        KEY_COOK_BEEF,
        KEY_USE_BEEF,
        KEY_PREPARE_LETTUCE,
        KEY_USE_LETTUCE,
        KEY_USE_BREAD,
        KEY_USE_PLATE,
        KEY_SERVE,
    ),
}


@dataclass
class GameEvent:
    tick: int
    kind: str  # delivery | wrong-serve | missed-order | fire-started |
    #            fire-extinguished | item-created | item-trashed | key-action
    payload: dict

    @property
    def reward(self) -> int:
        return int(self.payload.get("reward", 0))

    def to_dict(self) -> dict:
        return {"tick": self.tick, "kind": self.kind, "payload": self.payload}

    @classmethod
    def from_dict(cls, data: dict) -> "GameEvent":
        return cls(tick=data["tick"], kind=data["kind"], payload=data["payload"])


@dataclass
class PlayerState:
    position: Pos
    facing: Direction = Direction.DOWN
    held: Unit | None = None

    def to_dict(self) -> dict:
        return {
            "position": list(self.position),
            "facing": self.facing.value,
            "held": self.held.to_dict() if self.held is not None else None,
        }


@dataclass
class PanState:
    beef: Item | None = None
    fire: bool = False
    extinguish_progress: int = 0

    def free(self) -> bool:
        return self.beef is None and not self.fire

    def to_dict(self) -> dict:
        return {
            "beef": self.beef.to_dict() if self.beef else None,
            "fire": self.fire,
            "extinguish_progress": self.extinguish_progress,
        }


@dataclass
class CutboardState:
    lettuce: Item | None = None

    def to_dict(self) -> dict:
        return {"lettuce": self.lettuce.to_dict() if self.lettuce else None}


@dataclass
class GameState:
    layout: Layout
    config: GameConfig
    tick: int = 0
    score: int = 0
    players: list[PlayerState] = field(default_factory=list)
    surfaces: dict[Pos, Unit] = field(default_factory=dict)
    pans: dict[Pos, PanState] = field(default_factory=dict)
    cutboards: dict[Pos, CutboardState] = field(default_factory=dict)
    orders: list[Order] = field(default_factory=list)
    rng: Random = field(default_factory=Random)
    rng_draws: int = 0
    uid_counter: int = 0

    def next_uid(self) -> int:
        self.uid_counter += 1
        return self.uid_counter

    def other_player(self, player: int) -> int:
        return 1 - player if len(self.players) > 1 else player

    def iter_units(self) -> Iterator[tuple[str, Unit]]:
        """All item/plate units with a location tag (for census and audits)."""
        for pos, unit in self.surfaces.items():
            yield f"surface:{pos}", unit
        for pos, pan in self.pans.items():
            if pan.beef is not None:
                yield f"pan:{pos}", pan.beef
        for pos, board in self.cutboards.items():
            if board.lettuce is not None:
                yield f"cutboard:{pos}", board.lettuce
        for idx, player in enumerate(self.players):
            if player.held is not None:
                yield f"held:{idx}", player.held

    def fires(self) -> list[Pos]:
        return sorted(pos for pos, pan in self.pans.items() if pan.fire)

    def to_dict(self) -> dict:
        return {
            "tick": self.tick,
            "score": self.score,
            "players": [p.to_dict() for p in self.players],
            "surfaces": {
                f"{pos[0]},{pos[1]}": unit.to_dict()
                for pos, unit in sorted(self.surfaces.items())
            },
            "pans": {f"{pos[0]},{pos[1]}": pan.to_dict() for pos, pan in sorted(self.pans.items())},
            "cutboards": {
                f"{pos[0]},{pos[1]}": b.to_dict() for pos, b in sorted(self.cutboards.items())
            },
            "orders": [o.to_dict() for o in self.orders],
            "seed": self.config.seed,
            "rng_draws": self.rng_draws,
            "uid_counter": self.uid_counter,
        }


def build_initial_state(layout: Layout, config: GameConfig, *, players: int = 2) -> GameState:
    """Fresh episode state: players at spawns, extinguisher at its home."""
    config.validate()
    if players > len(layout.spawns):
        raise ValueError(f"layout provides {len(layout.spawns)} spawns, need {players}")
    state = GameState(layout=layout, config=config, rng=Random(config.seed))
    state.players = [PlayerState(position=layout.spawns[i]) for i in range(players)]
    state.pans = {pos: PanState() for pos in layout.cells_of(CellKind.PAN)}
    state.cutboards = {pos: CutboardState() for pos in layout.cells_of(CellKind.CUTBOARD)}
    for pos in layout.cells_of(CellKind.EXTINGUISHER_HOME):
        state.surfaces[pos] = Item(uid=state.next_uid(), name=FIRE_EXTINGUISHER, status="")
    return state


def step(state: GameState, actions: list[Action]) -> tuple[GameState, list[GameEvent]]:
    """Advance one tick with the given per-player actions (mutates in place)."""
    events: list[GameEvent] = []
    if len(actions) != len(state.players):
        raise ValueError("one action per player required")

    for idx, action in enumerate(actions):
        if action in MOVE_ACTIONS:
            _move(state, idx, MOVE_ACTIONS[action])
    for idx, action in enumerate(actions):
        if action == Action.INTERACT:
            _interact(state, idx, events)

    state, timer_events = advance_timers(state)
    events.extend(timer_events)
    state.tick += 1
    return state, events


def advance_timers(state: GameState) -> tuple[GameState, list[GameEvent]]:
    """Cooking/overcooking progress and order countdowns for one tick."""
    events: list[GameEvent] = []
    for pos in sorted(state.pans):
        pan = state.pans[pos]
        beef = pan.beef
        if beef is None:
            continue
        if beef.status == IN_PROGRESS:
            beef.progress += 1.0 / state.config.cook_ticks
            if beef.progress >= 1.0 - 1e-9:
                beef.status = WELL_COOKED
                beef.progress = 0.0
        elif beef.status == WELL_COOKED:
            beef.progress += 1.0 / state.config.overcook_ticks
            if beef.progress >= 1.0 - 1e-9:
                beef.status = OVERCOOKED
                beef.progress = 0.0
                pan.fire = True
                pan.extinguish_progress = 0
                events.append(
                    GameEvent(state.tick, "fire-started", {"pan": list(pos), "beef": beef.uid})
                )

    expired = []
    for order in state.orders:
        order.remain_time -= 1
        if order.remain_time <= 0:
            expired.append(order)
    for order in expired:
        state.orders.remove(order)
        state.score += MISSED_ORDER_PENALTY
        events.append(
            GameEvent(
                state.tick,
                "missed-order",
                {"name": order.name, "order_uid": order.uid, "reward": MISSED_ORDER_PENALTY},
            )
        )
    return state, events


def _move(state: GameState, idx: int, direction: Direction) -> None:
    player = state.players[idx]
    player.facing = direction
    dx, dy = direction.vector
    target = (player.position[0] + dx, player.position[1] + dy)
    if not state.layout.is_floor(target):
        return
    if any(p.position == target for i, p in enumerate(state.players) if i != idx):
        return
    player.position = target


def faced_cell(state: GameState, idx: int) -> Pos:
    player = state.players[idx]
    dx, dy = player.facing.vector
    return (player.position[0] + dx, player.position[1] + dy)


def _interact(state: GameState, idx: int, events: list[GameEvent]) -> None:
    pos = faced_cell(state, idx)
    if not state.layout.in_bounds(pos):
        return
    kind = state.layout.kind(pos)
    player = state.players[idx]

    if kind in COUNTER_KINDS:
        _interact_counter(state, idx, pos, events)
    elif kind == CellKind.PAN:
        _interact_pan(state, idx, pos, events)
    elif kind == CellKind.CUTBOARD:
        _interact_cutboard(state, idx, pos, events)
    elif kind == CellKind.SERVING:
        _interact_serving(state, idx, events)
    elif kind == CellKind.BEEF_STATION:
        _interact_ingredient_station(state, idx, BEEF, FRESH, events)
    elif kind == CellKind.LETTUCE_STATION:
        _interact_ingredient_station(state, idx, LETTUCE, UNCHOPPED, events)
    elif kind == CellKind.BREAD_STATION:
        _interact_ingredient_station(state, idx, BREAD, "", events)
    elif kind == CellKind.PLATE_STATION:
        _interact_plate_station(state, idx, events)
    # walls and floor: nothing to do
    del player


def _interact_ingredient_station(
    state: GameState, idx: int, name: str, status: str, events: list[GameEvent]
) -> None:
    player = state.players[idx]
    if player.held is None:
        item = Item(uid=state.next_uid(), name=name, status=status)
        player.held = item
        events.append(
            GameEvent(
                state.tick,
                "item-created",
                {"item": list(item.key()), "uid": item.uid, "player": idx},
            )
        )
        if name == BREAD:
            # Bread is ready as dispensed; taking it is the use milestone
            # once it lands on the served plate (tracked at stacking time).
            pass
    elif isinstance(player.held, Item) and player.held.name == name:
        # Returning the matching ingredient destroys it (trash route).
        events.append(
            GameEvent(
                state.tick,
                "item-trashed",
                {"item": list(player.held.key()), "uid": player.held.uid, "player": idx},
            )
        )
        player.held = None
    elif isinstance(player.held, Plate):
        # A held plate collects directly from a station when the dispensed
        # item is plate-ready (bread; raw beef and lettuce are not).
        item = Item(uid=state.uid_counter + 1, name=name, status=status)
        if plateable(item) and player.held.can_accept(name):
            state.next_uid()
            events.append(
                GameEvent(
                    state.tick,
                    "item-created",
                    {"item": list(item.key()), "uid": item.uid, "player": idx},
                )
            )
            _stack_onto_plate(state, idx, player.held, item, events)


def _interact_plate_station(state: GameState, idx: int, events: list[GameEvent]) -> None:
    player = state.players[idx]
    if player.held is None:
        plate = Plate(uid=state.next_uid(), fetched_by=idx)
        player.held = plate
        events.append(
            GameEvent(
                state.tick,
                "item-created",
                {"item": list(plate.key()), "uid": plate.uid, "player": idx},
            )
        )
        events.append(
            GameEvent(
                state.tick,
                "key-action",
                {"label": KEY_USE_PLATE, "player": idx, "uid": plate.uid},
            )
        )
    elif isinstance(player.held, Plate):
        # Any plate (with contents) can be returned and is destroyed.
        events.append(
            GameEvent(
                state.tick,
                "item-trashed",
                {"item": list(player.held.key()), "uid": player.held.uid, "player": idx},
            )
        )
        player.held = None


def _stack_onto_plate(
    state: GameState, idx: int, plate: Plate, item: Item, events: list[GameEvent]
) -> None:
    plate.add(item, idx)
    label = {BEEF: KEY_USE_BEEF, LETTUCE: KEY_USE_LETTUCE, BREAD: KEY_USE_BREAD}[item.name]
    events.append(
        GameEvent(state.tick, "key-action", {"label": label, "player": idx, "uid": item.uid})
    )


def _interact_counter(
    state: GameState, idx: int, pos: Pos, events: list[GameEvent]
) -> None:
    player = state.players[idx]
    surface = state.surfaces.get(pos)
    held = player.held

    if held is None:
        if surface is not None:
            player.held = surface
            del state.surfaces[pos]
        return

    if surface is None:
        state.surfaces[pos] = held
        player.held = None
        return

    # Both hands and counter occupied: try stacking/merging.
    if isinstance(held, Plate) and isinstance(surface, Item):
        if plateable(surface) and held.can_accept(surface.name):
            del state.surfaces[pos]
            _stack_onto_plate(state, idx, held, surface, events)
    elif isinstance(held, Item) and isinstance(surface, Plate):
        if plateable(held) and surface.can_accept(held.name):
            player.held = None
            _stack_onto_plate(state, idx, surface, held, events)
    elif isinstance(held, Plate) and isinstance(surface, Plate):
        combined = frozenset(held.contents) | frozenset(surface.contents)
        from .items import PLATE_CONTENTS_TO_NAME

        if (
            held.contents
            and not (frozenset(held.contents) & frozenset(surface.contents))
            and combined in PLATE_CONTENTS_TO_NAME
        ):
            for ingredient in sorted(held.contents):
                _stack_onto_plate(state, idx, surface, held.contents[ingredient], events)
            held.contents.clear()
            held.added_by.clear()


def _interact_pan(state: GameState, idx: int, pos: Pos, events: list[GameEvent]) -> None:
    player = state.players[idx]
    pan = state.pans[pos]
    held = player.held

    if pan.fire:
        if isinstance(held, Item) and held.name == FIRE_EXTINGUISHER:
            pan.extinguish_progress += 1
            if pan.extinguish_progress >= state.config.extinguish_interacts:
                pan.fire = False
                pan.extinguish_progress = 0
                events.append(
                    GameEvent(state.tick, "fire-extinguished", {"pan": list(pos), "player": idx})
                )
        return

    if held is None:
        if pan.beef is not None and pan.beef.status in (WELL_COOKED, OVERCOOKED):
            player.held = pan.beef
            pan.beef = None
        return

    if isinstance(held, Item) and held.name == BEEF and held.status == FRESH:
        if pan.beef is None:
            held.status = IN_PROGRESS
            held.progress = 0.0
            held.cooked_by = idx
            pan.beef = held
            player.held = None
            events.append(
                GameEvent(
                    state.tick,
                    "key-action",
                    {"label": KEY_COOK_BEEF, "player": idx, "uid": held.uid},
                )
            )
        return

    if isinstance(held, Plate):
        if pan.beef is not None and pan.beef.status == WELL_COOKED and held.can_accept(BEEF):
            beef = pan.beef
            pan.beef = None
            beef.progress = 0.0
            _stack_onto_plate(state, idx, held, beef, events)


def _interact_cutboard(state: GameState, idx: int, pos: Pos, events: list[GameEvent]) -> None:
    player = state.players[idx]
    board = state.cutboards[pos]
    held = player.held

    if held is None:
        lettuce = board.lettuce
        if lettuce is None:
            return
        if lettuce.status == UNCHOPPED:
            lettuce.progress += 1
            if lettuce.progress >= state.config.chop_interacts:
                lettuce.status = CHOPPED
                lettuce.progress = 0
                lettuce.chopped_by = idx
                events.append(
                    GameEvent(
                        state.tick,
                        "key-action",
                        {"label": KEY_PREPARE_LETTUCE, "player": idx, "uid": lettuce.uid},
                    )
                )
        else:  # chopped: take it
            player.held = lettuce
            board.lettuce = None
        return

    if isinstance(held, Item) and held.name == LETTUCE and held.status == UNCHOPPED:
        if board.lettuce is None:
            board.lettuce = held
            held.progress = 0
            player.held = None
        return

    if isinstance(held, Plate):
        lettuce = board.lettuce
        if lettuce is not None and lettuce.status == CHOPPED and held.can_accept(LETTUCE):
            board.lettuce = None
            _stack_onto_plate(state, idx, held, lettuce, events)


def _interact_serving(state: GameState, idx: int, events: list[GameEvent]) -> None:
    player = state.players[idx]
    held = player.held
    if held is None:
        return
    name, status = held.key()
    player.held = None

    if name in BURGER_VALUES:
        matches = [o for o in state.orders if o.name == name]
        if matches:
            order = min(matches, key=lambda o: o.remain_time)
            state.orders.remove(order)
            reward = BURGER_VALUES[name]
            state.score += reward
            key_events = _burger_key_events(held, idx)
            events.append(
                GameEvent(
                    state.tick,
                    "key-action",
                    {"label": KEY_SERVE, "player": idx, "uid": held.uid},
                )
            )
            events.append(
                GameEvent(
                    state.tick,
                    "delivery",
                    {
                        "name": name,
                        "reward": reward,
                        "player": idx,
                        "order_uid": order.uid,
                        "key_events": key_events,
                    },
                )
            )
            return

    state.score += WRONG_SERVE_PENALTY
    events.append(
        GameEvent(
            state.tick,
            "wrong-serve",
            {"item": [name, status], "player": idx, "reward": WRONG_SERVE_PENALTY},
        )
    )


def _burger_key_events(plate: Unit, server: int) -> dict[str, int | None]:
    """Attribution map for a served burger (who completed each milestone)."""
    assert isinstance(plate, Plate)
    attribution: dict[str, int | None] = {KEY_SERVE: server, KEY_USE_PLATE: plate.fetched_by}
    if BEEF in plate.contents:
        attribution[KEY_COOK_BEEF] = plate.contents[BEEF].cooked_by
        attribution[KEY_USE_BEEF] = plate.added_by.get(BEEF)
    if LETTUCE in plate.contents:
        attribution[KEY_PREPARE_LETTUCE] = plate.contents[LETTUCE].chopped_by
        attribution[KEY_USE_LETTUCE] = plate.added_by.get(LETTUCE)
    if BREAD in plate.contents:
        attribution[KEY_USE_BREAD] = plate.added_by.get(BREAD)
    return attribution


def state_hash(state: GameState) -> str:
    """Stable digest of the full world state (layout + dynamics)."""
    canonical = {"layout": state.layout.source, "state": state.to_dict()}
    blob = json.dumps(canonical, sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(blob.encode("utf-8")).hexdigest()


def remaining_ticks(state: GameState) -> int:
    return max(0, state.config.horizon - state.tick)


def cook_progress_fraction(state: GameState, pos: Pos) -> float | None:
    """Progress bar value for a pan, if it has an active phase."""
    pan = state.pans.get(pos)
    if pan is None or pan.beef is None:
        return None
    return min(1.0, pan.beef.progress)


def chop_progress_fraction(state: GameState, pos: Pos) -> float | None:
    board = state.cutboards.get(pos)
    if board is None or board.lettuce is None:
        return None
    if board.lettuce.status == CHOPPED:
        return 1.0
    return min(1.0, board.lettuce.progress / state.config.chop_interacts)


def extinguish_progress_fraction(state: GameState, pos: Pos) -> float | None:
    pan = state.pans.get(pos)
    if pan is None or not pan.fire:
        return None
    return min(1.0, pan.extinguish_progress / state.config.extinguish_interacts)


def ceil_ticks(seconds: float, tick_period: float) -> int:
    """Wall-clock seconds expressed as whole ticks (at least one)."""
    return max(1, math.ceil(seconds / tick_period))
