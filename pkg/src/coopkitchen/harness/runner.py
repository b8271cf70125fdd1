"""Episode and batch drivers.

Realtime mode paces the loop to the tick period against a drift-free
deadline clock and samples the wake-up jitter. Fast mode runs flat out;
backend latency still lands as tick-denominated delays (see system2), so
the two modes produce identical event streams for deterministic backends.
"""

from __future__ import annotations

import time
from pathlib import Path

from ..agents import build_agent
from ..agents.base import TickContext
from ..env.orders import OrderSchedule
from ..env.state import Action, state_hash, step
from ..env.state import build_initial_state
from ..env.orders import spawn_orders
from ..errors import ConfigError, CoopKitchenError
from ..metrics import EpisodeLog, TickLogRecord, compute_report, iqm_stderr
from ..metrics.episode_log import PROTOCOL_VERSION
from ..system2 import System2Config, make_backend
from .config import ExperimentConfig


def _build_agents(config: ExperimentConfig, tick_period: float, external_agents=None):
    if external_agents is not None:
        return list(external_agents)
    agents = []
    for seat, kind in enumerate(config.agents):
        backend = None
        if kind in ("dpt", "dpt-no-tom", "act", "react", "reflexion"):
            backend = make_backend(
                config.backend, base_url=config.base_url, model=config.model
            )
        s2 = System2Config(
            generate_every=config.generate_every,
            tom_every=config.tom_every,
            reflect_every=config.reflect_every,
            tick_period=tick_period,
            latency_mode="modeled",
        )
        agents.append(
            build_agent(kind, seat, backend=backend, s2_config=s2, tick_period=tick_period)
        )
    return agents


def run_episode(
    config: ExperimentConfig,
    *,
    seed: int | None = None,
    agents=None,
    on_tick=None,
    gate=None,
) -> EpisodeLog:
    """Drive one episode to the horizon and return its log.

    ``agents`` overrides construction (used by the live server, which owns
    the human seat); ``on_tick(state, events)`` is a per-tick callback for
    frame broadcasting; ``gate(tick)`` runs before each tick and may block
    (pause) or return False to abort the episode.
    """
    config.validate()
    layout = config.load_layout()
    game_config = config.game_config(seed=seed)
    players = len(config.agents) if agents is None else len(agents)
    state = build_initial_state(layout, game_config, players=players)
    schedule = OrderSchedule.from_config(game_config)
    state = spawn_orders(state, schedule)  # tick-0 arrivals are visible at the first decision
    crew = _build_agents(config, game_config.tick_period, agents)

    log = EpisodeLog(
        header={
            "protocol": PROTOCOL_VERSION,
            "layout_name": config.layout,
            "layout_text": layout.source,
            "game_config": game_config.to_dict(),
            "agents": list(config.agents) if agents is None else [type(a).__name__ for a in crew],
            "mode": config.mode,
            "seed": game_config.seed,
            "players": players,
        }
    )

    realtime = config.mode == "realtime"
    period = game_config.tick_period
    start = time.perf_counter()
    wall_deadline = start

    for t in range(game_config.horizon):
        if gate is not None and gate(t) is False:
            break
        actions = [agent.tick(state) for agent in crew]
        state, events = step(state, actions)
        state = spawn_orders(state, schedule)
        log.ticks.append(
            TickLogRecord(
                tick=t,
                actions=[a.value for a in actions],
                events=[e.to_dict() for e in events],
                score=state.score,
                state_hash=state_hash(state),
            )
        )
        ctx = TickContext(state=state, actions=tuple(actions), events=events)
        for agent in crew:
            agent.observe(ctx)
        if on_tick is not None:
            on_tick(state, events)
        if realtime:
            wall_deadline += period
            now = time.perf_counter()
            sleep_for = wall_deadline - now
            if sleep_for > 0:
                time.sleep(sleep_for)
            log.jitter.append(abs(time.perf_counter() - wall_deadline))

    for seat, agent in enumerate(crew):
        for record in agent.macro_records:
            log.macros.append(record.to_dict())
        for call in agent.backend_calls:
            log.calls.append({"player": seat, **call.to_dict()})
        for swap in agent.task_swaps:
            log.swaps.append({"player": seat, **swap})
        if config.include_decisions:
            for trace in agent.decision_trace:
                log.decisions.append({"player": seat, **trace.to_dict()})
        agent.close()

    log.footer = {
        "final_score": state.score,
        "wall_seconds": time.perf_counter() - start,
        "report": compute_report(log, agent=0).to_dict(),
    }
    return log


AGGREGATE_FIELDS = (
    "score",
    "atom_action_occupy",
    "failure_missed",
    "failure_wrong_serve",
    "score_efficiency",
    "deliveries",
)


def run_batch(config: ExperimentConfig, *, out_dir: str | Path | None = None) -> dict:
    """Repeat an episode config, aggregate reports with the IQM.

    Seeds derive as ``seed + run_index``. Failed runs are recorded and
    excluded from aggregation with a flag.
    """
    config.validate()
    out = Path(out_dir or config.out_dir or "runs")
    out.mkdir(parents=True, exist_ok=True)

    reports = []
    failures = []
    for run in range(config.runs):
        seed = config.seed + run
        try:
            log = run_episode(config, seed=seed)
        except CoopKitchenError as exc:
            failures.append({"run": run, "seed": seed, "error": str(exc)})
            continue
        log.save(out / f"episode_{run:03d}.jsonl")
        reports.append(compute_report(log, agent=0))

    aggregates = {}
    for field_name in AGGREGATE_FIELDS:
        values = [getattr(r, field_name) for r in reports]
        if values:
            agg = iqm_stderr(values)
            aggregates[field_name] = {
                "iqm": agg.iqm,
                "stderr": agg.stderr,
                "retained": agg.retained,
                "degraded": agg.degraded,
            }
    latencies = [r.latency_mean for r in reports if r.latency_mean is not None]
    if latencies:
        agg = iqm_stderr(latencies)
        aggregates["latency_mean"] = {
            "iqm": agg.iqm,
            "stderr": agg.stderr,
            "retained": agg.retained,
            "degraded": agg.degraded,
        }

    result = {
        "config": config.to_dict(),
        "runs_completed": len(reports),
        "failures": failures,
        "aggregates": aggregates,
        "per_run": [r.to_dict() for r in reports],
    }
    summary_path = out / "batch_summary.json"
    import json

    summary_path.write_text(json.dumps(result, indent=2), encoding="utf-8")
    return result
