"""Live-play sessions: one authoritative simulation loop per session.

The episode runs on a worker thread; websocket handlers communicate with
it only through the human seat's input queue (latest key within a tick
wins) and per-client outbound frame queues. A session starts paused until
the controller client sends ready, and pauses again if it disconnects,
with a grace period before the clock resumes.
"""

from __future__ import annotations

import json
import logging
import queue
import secrets
import threading
import time
import uuid
from dataclasses import dataclass, field
from pathlib import Path

from ..agents import HumanProxy, build_agent
from ..env.state import (
    GameEvent,
    GameState,
    chop_progress_fraction,
    cook_progress_fraction,
    extinguish_progress_fraction,
    remaining_ticks,
)
from ..errors import ConfigError
from ..harness.config import ExperimentConfig
from ..harness.runner import run_episode
from ..metrics import EpisodeLog
from ..metrics.aggregate import borda
from ..system2 import System2Config, make_backend

log = logging.getLogger(__name__)

PROTOCOL = 1
GRACE_SECONDS = 10.0
FRAME_QUEUE_SIZE = 16


def build_frame(state: GameState, events: list[GameEvent]) -> dict:
    """Render-ready snapshot sent every tick."""
    items = []
    for pos, unit in sorted(state.surfaces.items()):
        name, status = unit.key()
        items.append({"x": pos[0], "y": pos[1], "name": name, "status": status, "on": "counter"})
    for pos, pan in sorted(state.pans.items()):
        if pan.beef is not None:
            items.append(
                {
                    "x": pos[0],
                    "y": pos[1],
                    "name": pan.beef.name,
                    "status": pan.beef.status,
                    "on": "pan",
                    "progress": cook_progress_fraction(state, pos),
                }
            )
        if pan.fire:
            items.append(
                {
                    "x": pos[0],
                    "y": pos[1],
                    "name": "Fire",
                    "status": "",
                    "on": "pan",
                    "progress": extinguish_progress_fraction(state, pos),
                }
            )
    for pos, board in sorted(state.cutboards.items()):
        if board.lettuce is not None:
            items.append(
                {
                    "x": pos[0],
                    "y": pos[1],
                    "name": board.lettuce.name,
                    "status": board.lettuce.status,
                    "on": "cutboard",
                    "progress": chop_progress_fraction(state, pos),
                }
            )

    players = []
    for p in state.players:
        held = None
        if p.held is not None:
            name, status = p.held.key()
            held = {"name": name, "status": status}
        players.append(
            {
                "x": p.position[0],
                "y": p.position[1],
                "facing": p.facing.value,
                "held": held,
            }
        )

    lifetime = max(1, state.config.order_lifetime)
    orders = [
        {
            "name": o.name,
            "remain_time": o.remain_time,
            "remain_fraction": max(0.0, min(1.0, o.remain_time / lifetime)),
        }
        for o in state.orders
    ]
    return {
        "protocol": PROTOCOL,
        "type": "frame",
        "tick": state.tick,
        "remaining": remaining_ticks(state),
        "score": state.score,
        "players": players,
        "items": items,
        "orders": orders,
        "events": [e.kind for e in events],
    }


@dataclass
class _Client:
    queue: "queue.Queue[str]"
    controller: bool


class Session:
    def __init__(
        self,
        config: ExperimentConfig,
        *,
        human_seat: int = 1,
        log_dir: Path | None = None,
    ):
        if len(config.agents) != 2:
            raise ConfigError("live sessions need exactly two seats")
        self.session_id = uuid.uuid4().hex[:12]
        self.token = secrets.token_urlsafe(16)
        self.config = config
        self.human_seat = human_seat
        self.log_dir = log_dir
        self.human = HumanProxy(human_seat)
        self.clients: list[_Client] = []
        self.lock = threading.Lock()
        self.ready = threading.Event()
        self.resume = threading.Event()
        self.closed = threading.Event()
        self.ended = threading.Event()
        self.pause_started: float | None = None
        self.jitter: list[float] = []
        self.episode_log: EpisodeLog | None = None
        self.log_path: Path | None = None
        self.final_score: int | None = None
        self.start_message: dict | None = None
        self.rankings: list[list[str]] = []
        self._deadline: float | None = None
        self.thread = threading.Thread(target=self._run, name=f"session-{self.session_id}", daemon=True)

    # -- lifecycle -------------------------------------------------------------

    def start(self) -> None:
        layout = self.config.load_layout()
        self.start_message = {
            "protocol": PROTOCOL,
            "type": "start",
            "session": self.session_id,
            "seat": self.human_seat,
            "grid": layout.source.splitlines(),
            "width": layout.width,
            "height": layout.height,
            "tick_period": self.config.tick_period,
            "horizon": self.config.horizon,
        }
        self.thread.start()

    def _build_agents(self):
        agents = []
        for seat, kind in enumerate(self.config.agents):
            if seat == self.human_seat:
                agents.append(self.human)
                continue
            backend = None
            if kind in ("dpt", "dpt-no-tom", "act", "react", "reflexion"):
                backend = make_backend(
                    self.config.backend,
                    base_url=self.config.base_url,
                    model=self.config.model,
                )
            s2 = System2Config(
                generate_every=self.config.generate_every,
                tom_every=self.config.tom_every,
                reflect_every=self.config.reflect_every,
                tick_period=self.config.tick_period,
            )
            agents.append(build_agent(kind, seat, backend=backend, s2_config=s2))
        return agents

    def _gate(self, tick: int) -> bool:
        """Pacing and pause control; runs on the session thread."""
        if self.closed.is_set():
            return False
        self.ready.wait()
        paused = not self.resume.is_set()
        self.resume.wait()
        if self.closed.is_set():
            return False
        realtime = self.config.mode == "realtime"
        now = time.perf_counter()
        if self._deadline is None or paused:
            self._deadline = now  # fresh clock after start or pause
        if realtime:
            self._deadline += self.config.tick_period
            delay = self._deadline - time.perf_counter()
            if delay > 0:
                time.sleep(delay)
            self.jitter.append(abs(time.perf_counter() - self._deadline))
        return True

    def _run(self) -> None:
        try:
            agents = self._build_agents()
            run_config = ExperimentConfig(**{**self.config.to_dict(), "mode": "fast"})
            episode = run_episode(
                run_config,
                agents=agents,
                on_tick=self._broadcast,
                gate=self._gate,
            )
            episode.header["mode"] = self.config.mode
            episode.header["human_seat"] = self.human_seat
            episode.jitter.extend(self.jitter)
            self.episode_log = episode
            self.final_score = episode.final_score
            if self.log_dir is not None:
                self.log_dir.mkdir(parents=True, exist_ok=True)
                self.log_path = episode.save(self.log_dir / f"session_{self.session_id}.jsonl")
            self._send_all(
                {
                    "protocol": PROTOCOL,
                    "type": "end",
                    "score": self.final_score,
                    "log_id": self.session_id,
                }
            )
        except Exception:  # noqa: BLE001
            log.exception("session %s crashed", self.session_id)
        finally:
            self.ended.set()

    def close(self) -> None:
        self.closed.set()
        self.ready.set()
        self.resume.set()

    # -- websocket side ----------------------------------------------------------

    def attach(self, *, controller: bool) -> _Client:
        with self.lock:
            if controller and any(c.controller for c in self.clients):
                raise ConfigError("human seat already has a controller connection")
            client = _Client(queue=queue.Queue(maxsize=FRAME_QUEUE_SIZE), controller=controller)
            self.clients.append(client)
            if self.start_message is not None:
                client.queue.put(json.dumps(self.start_message))
            if controller:
                self.pause_started = None
            return client

    def detach(self, client: _Client) -> None:
        with self.lock:
            if client in self.clients:
                self.clients.remove(client)
            if client.controller and not self.ended.is_set():
                self.pause_started = time.monotonic()
                threading.Thread(target=self._grace_pause, daemon=True).start()

    def _grace_pause(self) -> None:
        started = self.pause_started
        time.sleep(GRACE_SECONDS)
        with self.lock:
            if self.pause_started == started and not any(
                c.controller for c in self.clients
            ):
                self.resume.clear()

    def handle_message(self, raw: str) -> None:
        try:
            message = json.loads(raw)
        except json.JSONDecodeError:
            return
        kind = message.get("type")
        if kind == "ready":
            self.ready.set()
            self.resume.set()
        elif kind == "input":
            if not self.ended.is_set():
                self.human.push_key(str(message.get("key", "")))

    def _send_all(self, payload: dict) -> None:
        text = json.dumps(payload)
        with self.lock:
            for client in self.clients:
                try:
                    client.queue.put_nowait(text)
                except queue.Full:
                    try:  # drop the oldest frame; the latest matters
                        client.queue.get_nowait()
                        client.queue.put_nowait(text)
                    except (queue.Empty, queue.Full):
                        pass

    def _broadcast(self, state: GameState, events: list[GameEvent]) -> None:
        self._send_all(build_frame(state, events))

    # -- ranking ----------------------------------------------------------------

    def submit_ranking(self, ordering: list[str]) -> dict:
        """Validate a post-game ranking; it must be Borda-consumable."""
        scores = borda([ordering])
        self.rankings.append(list(ordering))
        return {name: score for name, score in scores.items()}


class SessionManager:
    def __init__(self, base_config: ExperimentConfig, *, capacity: int = 8, log_dir: str | Path = "session_logs"):
        self.base_config = base_config
        self.capacity = capacity
        self.log_dir = Path(log_dir)
        self.sessions: dict[str, Session] = {}
        self.lock = threading.Lock()

    def open_session(self, overrides: dict | None = None, *, human_seat: int = 1) -> Session:
        with self.lock:
            live = [s for s in self.sessions.values() if not s.ended.is_set()]
            if len(live) >= self.capacity:
                raise ConfigError("session capacity exceeded")
        data = self.base_config.to_dict()
        for key, value in (overrides or {}).items():
            if key not in data:
                raise ConfigError(f"unknown session config key {key!r}")
            data[key] = value
        config = ExperimentConfig.from_dict(data)
        if len(config.agents) == 1:
            config.agents = [config.agents[0], "human"]
        session = Session(config, human_seat=human_seat, log_dir=self.log_dir)
        with self.lock:
            self.sessions[session.session_id] = session
        session.start()
        return session

    def get(self, session_id: str) -> Session | None:
        with self.lock:
            return self.sessions.get(session_id)

    def close_all(self) -> None:
        with self.lock:
            sessions = list(self.sessions.values())
        for session in sessions:
            session.close()
