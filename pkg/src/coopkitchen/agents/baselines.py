"""Act baseline: the model picks every macro itself.

One backend call per macro decision, no default pipeline; while the call
is pending the agent idles, so model latency shows up directly as lost
ticks. Invalid output degrades to a noop decision.
"""

from __future__ import annotations

import math
import queue
import threading
from dataclasses import dataclass

from ..dsl.tasks import AssignedTask, parse_condition, parse_macro_action
from ..env.document import snapshot_document
from ..env.state import Action, GameState, remaining_ticks
from ..errors import CoopKitchenError
from ..system1 import System1Controller
from ..system2 import Backend, BackendCall, PromptKit, TrajectoryBuffer
from ..system2.history import TickRecord
from ..system2.service import CallRecord
from .base import TickContext

ALWAYS = "lambda json_state: True"


@dataclass
class _ActResult:
    request_tick: int
    call: BackendCall
    error: str | None = None


class ActAgent:
    def __init__(self, player: int, *, backend: Backend, tick_period: float = 0.25):
        self.player = player
        self.backend = backend
        self.tick_period = tick_period
        self.controller = System1Controller(player, default_pipeline=False)
        self.history = TrajectoryBuffer(agent_player=player)
        self.prompts = PromptKit(framework="act", include_tom=False, agent_player=player)
        self.calls: list[CallRecord] = []
        self.inflight = False
        self.mailbox: queue.Queue[_ActResult] = queue.Queue()
        self.delayed: list[tuple[int, _ActResult]] = []

    def tick(self, state: GameState) -> Action:
        self._apply_due(state.tick)
        action = self.controller.tick(state)
        if (
            self.controller.active is None
            and not self.inflight
            and not self.controller.queue.pending()
        ):
            self._request(state)
        return action

    def _request(self, state: GameState) -> None:
        self.inflight = True
        tick = state.tick
        doc = snapshot_document(state, self.player)
        messages = self.prompts.act_messages(self.history.snapshot(), doc)
        if self.backend.synchronous:
            self._finish(self._call(tick, messages))
            return
        threading.Thread(
            target=lambda: self._finish(self._call(tick, messages)),
            name=f"act-{tick}",
            daemon=True,
        ).start()

    def _call(self, tick: int, messages: list[dict]) -> _ActResult:
        try:
            return _ActResult(tick, self.backend.complete(messages))
        except CoopKitchenError as exc:
            return _ActResult(tick, BackendCall(messages, "", 0.0, "malformed"), str(exc))

    def _finish(self, result: _ActResult) -> None:
        self.mailbox.put(result)

    def _apply_due(self, tick: int) -> None:
        while True:
            try:
                result = self.mailbox.get_nowait()
            except queue.Empty:
                break
            declared = result.call.declared_latency
            if declared is None:
                self._apply(result, tick)
            else:
                apply_at = result.request_tick + max(1, math.ceil(declared / self.tick_period))
                if apply_at <= tick:
                    self._apply(result, tick)
                else:
                    self.delayed.append((apply_at, result))
        still = []
        for apply_at, result in self.delayed:
            if apply_at <= tick:
                self._apply(result, tick)
            else:
                still.append((apply_at, result))
        self.delayed = still

    def _apply(self, result: _ActResult, tick: int) -> None:
        self.inflight = False
        record = CallRecord(
            job="act",
            request_tick=result.request_tick,
            latency=result.call.latency,
            declared_latency=result.call.declared_latency,
            outcome=result.call.outcome,
            apply_tick=tick,
        )
        self.calls.append(record)
        if result.error or result.call.outcome != "ok":
            return
        macro = parse_macro_action(result.call.response)
        if macro is None:
            record.outcome = "malformed"
            return  # noop: keep idling until the next decision call
        task = AssignedTask.conditional(parse_condition(ALWAYS), macro)
        self.controller.submit_tasks([task])

    def observe(self, ctx: TickContext) -> None:
        doc = snapshot_document(ctx.state, self.player)
        self.history.record(
            TickRecord(
                tick=ctx.state.tick,
                remaining=remaining_ticks(ctx.state),
                score=ctx.state.score,
                document=doc,
                actions=tuple(a.value for a in ctx.actions),
                reward_delta=sum(e.reward for e in ctx.events),
                deliveries=tuple(
                    f"{e.payload['name']} (+{e.payload['reward']})"
                    for e in ctx.events
                    if e.kind == "delivery"
                ),
                missed=tuple(
                    f"{e.payload['name']} ({e.payload['reward']})"
                    for e in ctx.events
                    if e.kind == "missed-order"
                ),
            )
        )

    def close(self) -> None:
        pass

    @property
    def backend_calls(self):
        return self.calls

    @property
    def macro_records(self):
        return self.controller.macro_log

    @property
    def task_swaps(self):
        return self.controller.swap_log

    @property
    def decision_trace(self):
        return self.controller.trace
