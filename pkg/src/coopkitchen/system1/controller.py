"""The per-tick fast controller: decide, compile, emit one atomic action.

Owns the task queue and the active plan for one player. Task swaps arrive
through a mailbox and are applied only at tick boundaries. Any internal
failure degrades to a noop for that tick; the loop never stalls.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field

from ..dsl.tasks import AssignedTask, MacroAction
from ..env.document import snapshot_document
from ..env.state import Action, GameState
from ..errors import NotReady
from ..executor import DONE, REPLAN, Plan, compile_macro, next_atomic
from .fsm import DecideOutcome, FsmLabel, TaskQueue, apply_assigned_tasks, decide

log = logging.getLogger(__name__)

REPLAN_STRIKES = 3  # consecutive failed recompiles before abandoning a macro


@dataclass
class MacroRecord:
    player: int
    macro: MacroAction
    origin: tuple[str, int | str] | None
    issued: int
    completed: int | None = None
    outcome: str = "running"  # running | done | failed | aborted
    atomics: int = 0

    def to_dict(self) -> dict:
        return {
            "player": self.player,
            "macro": self.macro.to_tuple(),
            "origin": list(self.origin) if self.origin else None,
            "issued": self.issued,
            "completed": self.completed,
            "outcome": self.outcome,
            "atomics": self.atomics,
        }


@dataclass
class TickTrace:
    tick: int
    fsm_state: str
    macro: tuple | None
    origin: tuple | None
    action: str
    eval_errors: list[str] = field(default_factory=list)

    def to_dict(self) -> dict:
        return {
            "tick": self.tick,
            "fsm_state": self.fsm_state,
            "macro": list(self.macro) if self.macro else None,
            "origin": list(self.origin) if self.origin else None,
            "action": self.action,
            "eval_errors": self.eval_errors,
        }


class System1Controller:
    def __init__(self, player: int, *, default_pipeline: bool = True):
        self.player = player
        self.default_pipeline = default_pipeline
        self.queue = TaskQueue()
        self.active: Plan | None = None
        self.active_record: MacroRecord | None = None
        self.replan_strikes = 0
        self._pending_swap: list[AssignedTask] | None = None
        self.macro_log: list[MacroRecord] = []
        self.trace: list[TickTrace] = []
        self.pending_errors: list[str] = []  # surfaced to the slow loop
        self.swap_log: list[dict] = []

    # -- mailbox ------------------------------------------------------------

    def submit_tasks(self, tasks: list[AssignedTask]) -> None:
        """Queue a task swap; it lands at the next tick boundary."""
        self._pending_swap = tasks

    def _drain_mailbox(self, tick: int) -> None:
        if self._pending_swap is None:
            return
        apply_assigned_tasks(self.queue, self._pending_swap)
        self.swap_log.append(
            {"tick": tick, "count": len(self._pending_swap), "mode": self.queue.mode}
        )
        self._pending_swap = None

    # -- macro lifecycle ------------------------------------------------------

    def _finish_macro(self, tick: int, outcome: str) -> None:
        if self.active_record is not None:
            self.active_record.completed = tick
            self.active_record.outcome = outcome
            self.active_record.atomics = self.active.atomics if self.active else 0
        self.active = None
        self.active_record = None
        self.replan_strikes = 0

    def _start_macro(
        self, state: GameState, macro: MacroAction, origin, tick: int
    ) -> bool:
        try:
            plan = compile_macro(state, macro, self.player, tick)
        except NotReady as exc:
            self.pending_errors.append(f"{macro.name}: {exc}")
            # An assemble blocked on a missing ingredient degrades to
            # preparing it; other blocks just wait for the world to change.
            if macro.name == "assemble" and exc.missing in ("Beef", "Lettuce"):
                fallback = MacroAction("prepare", {"food": exc.missing, "plate": False})
                return self._start_macro(state, fallback, origin, tick)
            return False
        record = MacroRecord(self.player, macro, origin, issued=tick)
        self.macro_log.append(record)
        if plan.status == "done":
            record.completed = tick
            record.outcome = "done"
            return False
        self.active = plan
        self.active_record = record
        return True

    # -- fire ----------------------------------------------------------------

    def _maybe_fire_override(self, state: GameState, doc, tick: int) -> None:
        if doc.count("Fire") == 0:
            return
        if self.active is not None and self.active.macro.name == "putout_fire":
            return
        try:
            plan = compile_macro(state, MacroAction("putout_fire", {}), self.player, tick)
        except NotReady:
            return  # extinguisher unavailable; keep working
        if plan.status == "done":
            return  # no reachable fire (it is in the other region)
        if self.active is not None:
            self._finish_macro(tick, "aborted")
        record = MacroRecord(self.player, MacroAction("putout_fire", {}), ("fire", "override"), tick)
        self.macro_log.append(record)
        self.active = plan
        self.active_record = record

    # -- main ----------------------------------------------------------------

    def tick(self, state: GameState) -> Action:
        tick = state.tick
        try:
            action, label, origin, errors = self._tick_inner(state, tick)
        except Exception:  # noqa: BLE001 - the loop must never stall
            log.exception("controller failure at tick %s", tick)
            action, label, origin, errors = Action.NOOP, FsmLabel.IDLE, None, ["internal error"]
            self.pending_errors.append("internal error")
        if self.active_record is not None and self.active is not None:
            self.active_record.atomics = self.active.atomics
        self.trace.append(
            TickTrace(
                tick=tick,
                fsm_state=label.value,
                macro=self.active.macro.to_tuple() if self.active else None,
                origin=origin,
                action=action.value,
                eval_errors=errors,
            )
        )
        return action

    def _tick_inner(self, state: GameState, tick: int):
        self._drain_mailbox(tick)
        doc = snapshot_document(state, self.player)
        self._maybe_fire_override(state, doc, tick)

        errors: list[str] = []
        origin = self.active_record.origin if self.active_record else None

        for _ in range(2):  # allow one same-tick re-decide after a macro ends
            if self.active is None:
                outcome = self._decide(doc, tick)
                errors.extend(outcome.eval_errors)
                self.pending_errors.extend(outcome.eval_errors)
                if outcome.macro is None:
                    return Action.NOOP, FsmLabel.IDLE, None, errors
                origin = outcome.origin
                if not self._start_macro(state, outcome.macro, outcome.origin, tick):
                    return Action.NOOP, FsmLabel.IDLE, origin, errors

            result = next_atomic(self.active, state)
            if result is DONE:
                self._finish_macro(tick, "done")
                doc = snapshot_document(state, self.player)
                continue
            if result is REPLAN:
                self.replan_strikes += 1
                if self.replan_strikes >= REPLAN_STRIKES:
                    self.pending_errors.append(
                        f"abandoned {self.active.macro.name}: {self.active.status}"
                    )
                    self._finish_macro(tick, "failed")
                    return Action.NOOP, FsmLabel.IDLE, origin, errors
                macro = self.active.macro
                record = self.active_record
                try:
                    self.active = compile_macro(state, macro, self.player, tick)
                except NotReady as exc:
                    self.pending_errors.append(f"{macro.name}: {exc}")
                    self._finish_macro(tick, "failed")
                    return Action.NOOP, FsmLabel.IDLE, origin, errors
                if self.active.status == "done":
                    self.active = None
                    if record is not None:
                        record.completed = tick
                        record.outcome = "done"
                    self.active_record = None
                    self.replan_strikes = 0
                    doc = snapshot_document(state, self.player)
                    continue
                self.active_record = record
                result = next_atomic(self.active, state)
                if result in (DONE, REPLAN):
                    return Action.NOOP, self._label(), origin, errors
                # strikes stay: a recompiled plan that only waits (blocked
                # by the partner) must not reset the abandon counter
                return result, self._label(), origin, errors
            if result != Action.NOOP:
                self.replan_strikes = 0
            return result, self._label(), origin, errors
        return Action.NOOP, FsmLabel.IDLE, origin, errors

    def _decide(self, doc, tick: int) -> DecideOutcome:
        if not self.default_pipeline:
            trimmed = TaskQueue(tasks=self.queue.tasks, mode="directed")
            outcome = decide_without_default(doc, trimmed, tick)
        else:
            outcome = decide(doc, self.queue, tick)
        return outcome

    def _label(self) -> FsmLabel:
        if self.active is None:
            return FsmLabel.IDLE
        if self.active.macro.name == "putout_fire":
            return FsmLabel.EMERGENCY_FIRE
        sg = self.active.current()
        if sg is not None and not sg.interact and sg.done_when is not None:
            return FsmLabel.AWAITING_COOK
        return FsmLabel.EXECUTING

    def drain_errors(self) -> list[str]:
        out = self.pending_errors
        self.pending_errors = []
        return out


def decide_without_default(doc, queue: TaskQueue, tick: int) -> DecideOutcome:
    """Task scan only; never falls back to the order pipeline (Act-style)."""
    full = decide(doc, queue, tick)
    if full.origin is not None and full.origin[0] == "default":
        return DecideOutcome(None, None, full.eval_errors)
    return full
