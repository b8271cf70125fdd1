"""The slow loop: periodic inference, reflection, and policy generation.

Jobs never run on the tick thread unless the backend is synchronous (a
fixture lookup); slow backends run in daemon threads. Either way results
land in a mailbox and are applied only at tick boundaries, delayed by the
call's modeled latency in ticks so fast-mode and realtime-mode traces
agree for deterministic backends. A job whose previous call has not been
applied yet is skipped, not queued.
"""

from __future__ import annotations

import logging
import math
import queue
import threading
from dataclasses import dataclass, field

from ..dsl.tasks import parse_assigned_tasks
from ..env.document import StateDocument
from ..env.state import GameEvent
from ..errors import CoopKitchenError
from .backends import Backend, BackendCall, extract_blocks
from .history import TrajectoryBuffer
from .prompts import PromptKit

log = logging.getLogger(__name__)

REFLEX_EVENT_KINDS = ("missed-order", "wrong-serve", "fire-started")


@dataclass
class Belief:
    text: str
    index: int
    tick: int


@dataclass
class Guidelines:
    text: str
    index: int
    tick: int


@dataclass
class System2Config:
    generate_every: int = 40  # policy generation cadence (ticks)
    tom_every: int = 100
    reflect_every: int = 100
    tick_period: float = 0.25
    latency_mode: str = "modeled"  # modeled | wallclock
    enable_tom: bool = True
    enable_reflection: bool = True
    enable_generation: bool = True
    reflect_on_events: bool = True


@dataclass
class CallRecord:
    job: str
    request_tick: int
    latency: float
    declared_latency: float | None
    outcome: str
    apply_tick: int | None = None

    def to_dict(self) -> dict:
        return {
            "job": self.job,
            "request_tick": self.request_tick,
            "latency": self.latency,
            "declared_latency": self.declared_latency,
            "outcome": self.outcome,
            "apply_tick": self.apply_tick,
        }


@dataclass
class _PendingResult:
    job: str
    request_tick: int
    call: BackendCall
    error: str | None = None


class System2Service:
    """Owns belief/guidelines and feeds task swaps to a System1Controller."""

    def __init__(
        self,
        *,
        backend: Backend,
        prompts: PromptKit,
        history: TrajectoryBuffer,
        controller,
        config: System2Config | None = None,
    ):
        self.backend = backend
        self.prompts = prompts
        self.history = history
        self.controller = controller
        self.config = config or System2Config()
        self.belief: Belief | None = None
        self.guidelines: Guidelines | None = None
        self.last_thought: str | None = None
        self.inflight: dict[str, bool] = {}
        self.mailbox: queue.Queue[_PendingResult] = queue.Queue()
        self.delayed: list[tuple[int, _PendingResult]] = []
        self.calls: list[CallRecord] = []
        self.diagnostics: list[str] = []
        self.events_log: list[dict] = []

    # -- triggering ----------------------------------------------------------

    def on_tick(self, tick: int, events: list[GameEvent], current: StateDocument) -> None:
        """Apply due results, then fire due jobs. Called once per tick."""
        self._apply_due(tick)

        if len(self.history) == 0:
            return
        cfg = self.config
        if cfg.enable_tom and self._due(tick, cfg.tom_every):
            self._trigger("tom", tick, current)
        reflect_now = cfg.enable_reflection and self._due(tick, cfg.reflect_every)
        if cfg.enable_reflection and cfg.reflect_on_events and any(
            e.kind in REFLEX_EVENT_KINDS for e in events
        ):
            reflect_now = True
        if reflect_now:
            self._trigger("reflect", tick, current)
        if cfg.enable_generation and self._due(tick, cfg.generate_every):
            self._trigger("generate", tick, current)

    @staticmethod
    def _due(tick: int, period: int) -> bool:
        return period > 0 and tick > 0 and tick % period == 0

    def _trigger(self, job: str, tick: int, current: StateDocument) -> None:
        if self.inflight.get(job):
            self.events_log.append({"tick": tick, "job": job, "skipped": "in-flight"})
            return
        self.inflight[job] = True
        messages = self._render(job, current)

        if self.backend.synchronous:
            result = self._call(job, tick, messages)
            self._enqueue(result)
            return
        thread = threading.Thread(
            target=lambda: self._enqueue(self._call(job, tick, messages)),
            name=f"s2-{job}-{tick}",
            daemon=True,
        )
        thread.start()

    def _render(self, job: str, current: StateDocument) -> list[dict]:
        snapshot = self.history.snapshot()
        if job == "tom":
            return self.prompts.tom_messages(snapshot, self.belief.text if self.belief else None)
        if job == "reflect":
            return self.prompts.reflection_messages(
                snapshot,
                self.belief.text if self.belief else None,
                self.guidelines.text if self.guidelines else None,
            )
        window = self.history.window(self.config.generate_every)
        diagnostics = self.diagnostics[-3:] + self.controller.drain_errors()[-3:]
        return self.prompts.generation_messages(
            window,
            current=current,
            tasks=self.controller.queue.pending(),
            guidelines=self.guidelines.text if self.guidelines else None,
            belief=self.belief.text if self.belief else None,
            diagnostics=diagnostics or None,
            thought=self.last_thought,
        )

    def _call(self, job: str, tick: int, messages: list[dict]) -> _PendingResult:
        try:
            call = self.backend.complete(messages)
            return _PendingResult(job=job, request_tick=tick, call=call)
        except CoopKitchenError as exc:
            return _PendingResult(
                job=job,
                request_tick=tick,
                call=BackendCall(messages, "", 0.0, "malformed"),
                error=str(exc),
            )
        except Exception as exc:  # noqa: BLE001 - worker threads must not die loudly
            log.exception("system2 %s call failed", job)
            return _PendingResult(
                job=job,
                request_tick=tick,
                call=BackendCall(messages, "", 0.0, "malformed"),
                error=f"internal: {exc}",
            )

    def _enqueue(self, result: _PendingResult) -> None:
        self.mailbox.put(result)

    # -- application ----------------------------------------------------------

    def _apply_ticks(self, result: _PendingResult) -> int | None:
        """Tick delay derived from modeled latency; None = apply immediately."""
        latency = result.call.declared_latency
        if latency is None:
            if self.config.latency_mode == "modeled":
                latency = result.call.latency
            else:
                return None
        return result.request_tick + max(1, math.ceil(latency / self.config.tick_period))

    def _apply_due(self, tick: int) -> None:
        while True:
            try:
                result = self.mailbox.get_nowait()
            except queue.Empty:
                break
            apply_at = self._apply_ticks(result)
            if apply_at is None or apply_at <= tick:
                self._apply(result, tick)
            else:
                self.delayed.append((apply_at, result))
        still: list[tuple[int, _PendingResult]] = []
        for apply_at, result in self.delayed:
            if apply_at <= tick:
                self._apply(result, tick)
            else:
                still.append((apply_at, result))
        self.delayed = still

    def _apply(self, result: _PendingResult, tick: int) -> None:
        self.inflight[result.job] = False
        record = CallRecord(
            job=result.job,
            request_tick=result.request_tick,
            latency=result.call.latency,
            declared_latency=result.call.declared_latency,
            outcome=result.call.outcome,
            apply_tick=tick,
        )
        self.calls.append(record)
        if result.error:
            self.diagnostics.append(f"{result.job}: {result.error}")
            record.outcome = "malformed"
            return
        if result.call.outcome != "ok":
            return

        blocks = extract_blocks(result.call.response)
        text_block = blocks.get("text", "")

        if result.job == "tom":
            if not text_block:
                record.outcome = "malformed"
                return
            if self.belief is not None and result.request_tick <= self.belief.tick:
                return  # stale: generated against an older history range
            index = (self.belief.index + 1) if self.belief else 1
            self.belief = Belief(text=text_block, index=index, tick=result.request_tick)
            return

        if result.job == "reflect":
            if not text_block:
                record.outcome = "malformed"
                return
            if self.guidelines is not None and result.request_tick <= self.guidelines.tick:
                return
            index = (self.guidelines.index + 1) if self.guidelines else 1
            self.guidelines = Guidelines(text=text_block, index=index, tick=result.request_tick)
            return

        # generate: a thought plus a task-list block
        if text_block:
            self.last_thought = text_block
        body = blocks.get("json", "")
        if not body:
            record.outcome = "malformed"
            self.diagnostics.append("generate: no json block in output")
            return
        try:
            tasks = parse_assigned_tasks(body)
        except CoopKitchenError as exc:
            self.diagnostics.append(f"generate: {exc}")
            record.outcome = "malformed"
            return
        self.controller.submit_tasks(tasks)
        self.events_log.append(
            {"tick": tick, "job": "generate", "applied_tasks": len(tasks)}
        )
