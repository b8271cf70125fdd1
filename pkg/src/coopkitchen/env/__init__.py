from .layout import CellKind, Layout, parse_layout, load_layout, builtin_layout_path
from .config import GameConfig
from .items import Item, Plate, OBJECT_CATALOG, derived_name
from .orders import Order, OrderSchedule, spawn_orders
from .state import (
    Action,
    Direction,
    GameEvent,
    GameState,
    PlayerState,
    advance_timers,
    build_initial_state,
    state_hash,
    step,
)
from .document import StateDocument, snapshot_document, render_document

__all__ = [
    "Action",
    "CellKind",
    "Direction",
    "GameConfig",
    "GameEvent",
    "GameState",
    "Item",
    "Layout",
    "OBJECT_CATALOG",
    "Order",
    "OrderSchedule",
    "Plate",
    "PlayerState",
    "StateDocument",
    "advance_timers",
    "build_initial_state",
    "builtin_layout_path",
    "derived_name",
    "load_layout",
    "parse_layout",
    "render_document",
    "snapshot_document",
    "spawn_orders",
    "state_hash",
    "step",
]
