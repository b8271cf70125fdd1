"""Fast decision layer: task queue semantics and the per-tick macro choice.

Precedence each tick: fire emergency, then the task list scanned head
first (guarded actions fire once when their condition holds; an order goal
blocks the scan until its order is gone), then the default pipeline that
works the pending order with the least remaining time.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum

from ..dsl.conditions import eval_condition
from ..dsl.tasks import AssignedTask, MacroAction
from ..env.document import StateDocument
from ..env.items import BEEF, BREAD, BURGER_INGREDIENTS, CHOPPED, LETTUCE, WELL_COOKED
from ..errors import EvalError


class FsmLabel(str, Enum):
    IDLE = "Idle"
    EXECUTING = "Executing"
    AWAITING_COOK = "AwaitingCook"
    EMERGENCY_FIRE = "EmergencyFire"


@dataclass
class TaskQueue:
    tasks: list[AssignedTask] = field(default_factory=list)
    mode: str = "default"  # default | directed

    def pending(self) -> list[AssignedTask]:
        return [t for t in self.tasks if not t.consumed]

    def drained(self) -> bool:
        return not self.pending()


def apply_assigned_tasks(queue: TaskQueue, tasks: list[AssignedTask]) -> TaskQueue:
    """Wholesale swap of the unconsumed tasks (atomic at a tick boundary)."""
    queue.tasks = [t.copy() for t in tasks]
    queue.mode = "directed" if queue.tasks else "default"
    return queue


@dataclass
class DecideOutcome:
    macro: MacroAction | None  # None: continue / nothing to do this tick
    origin: tuple[str, int | str] | None = None  # ("task", i) | ("goal", i) | ("default", name)
    eval_errors: list[str] = field(default_factory=list)


def _beef_available(doc: StateDocument) -> bool:
    return (
        doc.count(BEEF, WELL_COOKED) > 0
        or doc.count("BeefLettuce") > 0
        or doc.count("BeefBurger") > 0
    )


def _lettuce_available(doc: StateDocument) -> bool:
    return (
        doc.count(LETTUCE, CHOPPED) > 0
        or doc.count("BeefLettuce") > 0
        or doc.count("LettuceBurger") > 0
    )


def assemble_ready(doc: StateDocument, target: str) -> bool:
    """Whether the target burger can be assembled from current stock.

    Bread never blocks (the station is an unlimited fallback). Partial
    stacks count: an existing LettuceBurger plus cooked beef can finish a
    BeefLettuceBurger.
    """
    needs = BURGER_INGREDIENTS[target]
    beef_ok = BEEF not in needs or _beef_available(doc)
    lettuce_ok = LETTUCE not in needs or _lettuce_available(doc)
    return beef_ok and lettuce_ok


def pipeline_next(doc: StateDocument, target: str) -> MacroAction | None:
    """Next macro advancing one burger order: serve, assemble, or prepare.

    Returns None when the right move is to wait (ingredients are cooking).
    Preparation is skipped while supply already covers the step (beef
    counts in-progress stock), which is the over-production guard.
    """
    if doc.count(target) > 0:
        return MacroAction("serve", {"food": target})
    if assemble_ready(doc, target):
        return MacroAction("assemble", {"food": target})

    needs = BURGER_INGREDIENTS[target]
    if BEEF in needs and not _beef_available(doc):
        if doc.count(BEEF, "In-progress") == 0:
            return MacroAction("prepare", {"food": BEEF, "plate": False})
        # Beef already cooking; see if lettuce can be readied meanwhile.
        if LETTUCE in needs and not _lettuce_available(doc):
            return MacroAction("prepare", {"food": LETTUCE, "plate": False})
        return None
    if LETTUCE in needs and not _lettuce_available(doc):
        return MacroAction("prepare", {"food": LETTUCE, "plate": False})
    return None


def decide(doc: StateDocument, queue: TaskQueue, tick: int) -> DecideOutcome:
    """Pick the macro to start at a macro boundary.

    The caller handles the fire override and only calls this when no macro
    is active. Consumes fired conditionals and dead order goals in place.
    """
    errors: list[str] = []
    pending_names = [o["name"] for o in doc.orders]

    for i, task in enumerate(queue.tasks):
        if task.consumed:
            continue
        if task.kind == "conditional":
            try:
                if eval_condition(task.condition, doc):
                    task.consumed = True
                    return DecideOutcome(task.action, ("task", i), errors)
            except EvalError as exc:
                task.consumed = True
                errors.append(f"task {i}: {exc}")
            continue
        # Order goal: dead once no such order is pending; otherwise it owns
        # the pipeline until served or expired.
        if task.order_name not in pending_names:
            task.consumed = True
            continue
        macro = pipeline_next(doc, task.order_name)
        return DecideOutcome(macro, ("goal", i), errors)

    if queue.mode == "directed" and queue.drained():
        queue.mode = "default"

    if doc.orders:
        target = min(doc.orders, key=lambda o: o["remain_time"])["name"]
        macro = pipeline_next(doc, target)
        if macro is not None:
            return DecideOutcome(macro, ("default", target), errors)
    return DecideOutcome(None, None, errors)
