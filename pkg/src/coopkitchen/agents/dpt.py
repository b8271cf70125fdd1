"""The dual-loop agent: FSM fast path plus an asynchronous reasoning loop.

Variants are wired by flags: the pure-FSM agent runs with no slow loop at
all; the no-ToM ablation drops belief inference and the belief section of
every prompt; the ReAct and Reflexion baselines reuse the same machinery
with their own output prompts and cadences.
"""

from __future__ import annotations

from ..env.document import snapshot_document
from ..env.items import BURGER_VALUES
from ..env.state import Action, GameState, remaining_ticks
from ..system1 import System1Controller
from ..system2 import Backend, PromptKit, System2Config, System2Service, TrajectoryBuffer
from ..system2.history import TickRecord
from .base import TickContext


class DptAgent:
    def __init__(
        self,
        player: int,
        *,
        backend: Backend | None = None,
        framework: str = "dpt",
        include_tom: bool = True,
        s2_config: System2Config | None = None,
        default_pipeline: bool = True,
        history_capacity: int = 600,
    ):
        self.player = player
        self.controller = System1Controller(player, default_pipeline=default_pipeline)
        self.history = TrajectoryBuffer(capacity=history_capacity, agent_player=player)
        self.service: System2Service | None = None
        if backend is not None:
            cfg = s2_config or System2Config()
            if framework == "react":
                cfg.enable_tom = False
                cfg.enable_reflection = False
            elif framework == "reflexion":
                cfg.enable_tom = False
                cfg.enable_generation = False  # reflexion output carries the tasks
                cfg.reflect_on_events = True
            elif not include_tom:
                cfg.enable_tom = False
            self.service = System2Service(
                backend=backend,
                prompts=PromptKit(
                    framework=framework, include_tom=include_tom, agent_player=player
                ),
                history=self.history,
                controller=self.controller,
                config=cfg,
            )
            self.framework = framework
        else:
            self.framework = "fsm"

    def tick(self, state: GameState) -> Action:
        return self.controller.tick(state)

    def observe(self, ctx: TickContext) -> None:
        doc = snapshot_document(ctx.state, self.player)
        deliveries = tuple(
            f"{e.payload['name']} (+{e.payload['reward']})"
            for e in ctx.events
            if e.kind == "delivery"
        )
        missed = tuple(
            f"{e.payload['name']} ({e.payload['reward']})"
            for e in ctx.events
            if e.kind == "missed-order"
        )
        reward = sum(e.reward for e in ctx.events)
        self.history.record(
            TickRecord(
                tick=ctx.state.tick,
                remaining=remaining_ticks(ctx.state),
                score=ctx.state.score,
                document=doc,
                actions=tuple(a.value for a in ctx.actions),
                reward_delta=reward,
                deliveries=deliveries,
                missed=missed,
            )
        )
        # Order goals complete on a matching delivery.
        for event in ctx.events:
            if event.kind != "delivery":
                continue
            name = event.payload["name"]
            if name not in BURGER_VALUES:
                continue
            for task in self.controller.queue.tasks:
                if task.kind == "order_goal" and not task.consumed and task.order_name == name:
                    task.consumed = True
                    break
        if self.service is not None:
            self.service.on_tick(ctx.state.tick, ctx.events, doc)

    def close(self) -> None:
        pass

    # -- introspection for logs/metrics --------------------------------------

    @property
    def backend_calls(self):
        return self.service.calls if self.service else []

    @property
    def macro_records(self):
        return self.controller.macro_log

    @property
    def task_swaps(self):
        return self.controller.swap_log

    @property
    def decision_trace(self):
        return self.controller.trace


def fsm_only_agent(player: int) -> DptAgent:
    return DptAgent(player, backend=None)
