"""Scripted rule-based partners and the human input proxy.

The specialists work the macro layer: the beef partner loops
prepare-then-pass for well-cooked beef, the lettuce partner does the same
for chopped lettuce, and the assembler builds and serves whatever pending
order has ready ingredients. Production caps (supply <= demand + 1) keep
them from flooding the counters.
"""

from __future__ import annotations

import logging
import threading
from collections import deque

from ..dsl.tasks import MacroAction
from ..env.document import StateDocument, snapshot_document
from ..env.items import BEEF, CHOPPED, IN_PROGRESS, LETTUCE, WELL_COOKED, Item
from ..env.layout import CellKind
from ..env.state import Action, GameState
from ..errors import NotReady
from ..executor import DONE, REPLAN, Plan, compile_macro, next_atomic
from ..system1.fsm import assemble_ready
from .base import TickContext

log = logging.getLogger(__name__)

BEEF_ORDERS = ("BeefBurger", "BeefLettuceBurger")
LETTUCE_ORDERS = ("LettuceBurger", "BeefLettuceBurger")


def _demand(doc: StateDocument, names: tuple[str, ...]) -> int:
    return sum(1 for o in doc.orders if o["name"] in names)


def _unpassed(state: GameState, name: str, status: str) -> bool:
    """A bare (name, status) item not yet on the pass-on surface."""
    for pos, unit in state.surfaces.items():
        if (
            isinstance(unit, Item)
            and unit.key() == (name, status)
            and state.layout.kind(pos) != CellKind.CENTER_COUNTER
        ):
            return True
    if name == BEEF:
        return any(
            pan.beef is not None and pan.beef.status == WELL_COOKED
            for pan in state.pans.values()
        )
    if name == LETTUCE:
        return any(
            b.lettuce is not None and b.lettuce.status == CHOPPED
            for b in state.cutboards.values()
        )
    return False


def rule_partner_step(kind: str, doc: StateDocument, state: GameState) -> MacroAction | None:
    """Macro choice for a specialist; None means idle this tick."""
    if kind == "beef":
        if _unpassed(state, BEEF, WELL_COOKED):
            return MacroAction("pass_on", {"thing": BEEF, "thing_status": WELL_COOKED})
        supply = doc.count(BEEF, WELL_COOKED) + doc.count(BEEF, IN_PROGRESS)
        if supply <= _demand(doc, BEEF_ORDERS):
            return MacroAction("prepare", {"food": BEEF, "plate": False})
        return None
    if kind == "lettuce":
        if _unpassed(state, LETTUCE, CHOPPED):
            return MacroAction("pass_on", {"thing": LETTUCE, "thing_status": CHOPPED})
        if doc.count(LETTUCE, CHOPPED) <= _demand(doc, LETTUCE_ORDERS):
            return MacroAction("prepare", {"food": LETTUCE, "plate": False})
        return None
    if kind == "assembler":
        pending = sorted(doc.orders, key=lambda o: (o["remain_time"], o["name"]))
        for order in pending:
            if doc.count(order["name"]) > 0:
                return MacroAction("serve", {"food": order["name"]})
        for order in pending:
            if assemble_ready(doc, order["name"]):
                return MacroAction("assemble", {"food": order["name"]})
        return None
    raise ValueError(f"unknown rule partner kind {kind!r}")


class RulePartner:
    def __init__(self, player: int, kind: str):
        if kind not in ("beef", "lettuce", "assembler"):
            raise ValueError(f"unknown rule partner kind {kind!r}")
        self.player = player
        self.kind = kind
        self.active: Plan | None = None
        self.strikes = 0
        self.macro_log: list = []

    def tick(self, state: GameState) -> Action:
        try:
            return self._tick_inner(state)
        except Exception:  # noqa: BLE001
            log.exception("rule partner failure")
            return Action.NOOP

    def _tick_inner(self, state: GameState) -> Action:
        if self.active is None:
            doc = snapshot_document(state, self.player)
            macro = rule_partner_step(self.kind, doc, state)
            if macro is None:
                return Action.NOOP
            try:
                plan = compile_macro(state, macro, self.player, state.tick)
            except NotReady:
                return Action.NOOP
            if plan.status == "done":
                return Action.NOOP
            self.active = plan

        result = next_atomic(self.active, state)
        if result is DONE:
            self.macro_log.append((self.active.macro.name, "done", state.tick))
            self.active = None
            return Action.NOOP
        if result is REPLAN:
            self.strikes += 1
            self.macro_log.append((self.active.macro.name, "replanned", state.tick))
            self.active = None
            if self.strikes > 3:
                self.strikes = 0
            return Action.NOOP
        self.strikes = 0
        return result

    def observe(self, ctx: TickContext) -> None:
        pass

    def close(self) -> None:
        pass

    @property
    def backend_calls(self):
        return []

    @property
    def macro_records(self):
        return []

    @property
    def task_swaps(self):
        return []

    @property
    def decision_trace(self):
        return []


class HumanProxy:
    """A seat driven by external key input; latest input within a tick wins."""

    KEYMAP = {
        "up": Action.UP,
        "down": Action.DOWN,
        "left": Action.LEFT,
        "right": Action.RIGHT,
        "space": Action.INTERACT,
    }

    def __init__(self, player: int):
        self.player = player
        self._lock = threading.Lock()
        self._queue: deque[Action] = deque(maxlen=1)

    def push_key(self, key: str) -> None:
        action = self.KEYMAP.get(key)
        if action is None:
            return  # unknown keys ignored
        with self._lock:
            self._queue.append(action)

    def tick(self, state: GameState) -> Action:
        with self._lock:
            if self._queue:
                return self._queue.popleft()
        return Action.NOOP

    def observe(self, ctx: TickContext) -> None:
        pass

    def close(self) -> None:
        pass

    @property
    def backend_calls(self):
        return []

    @property
    def macro_records(self):
        return []

    @property
    def task_swaps(self):
        return []

    @property
    def decision_trace(self):
        return []
