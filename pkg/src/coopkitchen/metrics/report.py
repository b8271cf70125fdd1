"""Per-episode metrics from a log.

Definitions: action occupancy is the fraction of ticks with a non-noop
action from the agent; score efficiency divides delivery gains (penalties
excluded) by the number of the agent's macros that executed at least one
atomic action; the contribution rate attributes each served burger's key
events to whichever player's interact completed them.
"""

from __future__ import annotations

import json
import math
import statistics
from dataclasses import dataclass

from .episode_log import EpisodeLog


@dataclass
class MetricsReport:
    agent: int
    score: int
    atom_action_occupy: float
    failure_missed: int
    failure_wrong_serve: int
    score_efficiency: float
    macros_executed: int
    latency_mean: float | None
    latency_stderr: float | None
    contribution_rate: float | None
    deliveries: int

    def to_dict(self) -> dict:
        return {
            "agent": self.agent,
            "score": self.score,
            "atom_action_occupy": self.atom_action_occupy,
            "failure_missed": self.failure_missed,
            "failure_wrong_serve": self.failure_wrong_serve,
            "score_efficiency": self.score_efficiency,
            "macros_executed": self.macros_executed,
            "latency_mean": self.latency_mean,
            "latency_stderr": self.latency_stderr,
            "contribution_rate": self.contribution_rate,
            "deliveries": self.deliveries,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2)

    def render_table(self) -> str:
        rows = [
            ("Score", f"{self.score}"),
            ("Atom Action Occupy", f"{self.atom_action_occupy:.3f}"),
            ("Failure Missed", f"{self.failure_missed}"),
            ("Failure Wrong Serve", f"{self.failure_wrong_serve}"),
            ("Score Efficiency", f"{self.score_efficiency:.3f}"),
            ("Deliveries", f"{self.deliveries}"),
            (
                "Latency (s)",
                "-"
                if self.latency_mean is None
                else f"{self.latency_mean:.3f} +/- {self.latency_stderr:.3f}",
            ),
            (
                "Contribution Rate",
                "-" if self.contribution_rate is None else f"{self.contribution_rate:.3f}",
            ),
        ]
        width = max(len(name) for name, _ in rows)
        return "\n".join(f"{name.ljust(width)}  {value}" for name, value in rows)


def compute_report(log: EpisodeLog, agent: int = 0) -> MetricsReport:
    total_ticks = len(log.ticks)
    active = 0
    missed = 0
    wrong = 0
    gains = 0
    deliveries = 0
    ke_agent = 0
    ke_other = 0

    for record in log.ticks:
        if agent < len(record.actions) and record.actions[agent] != "noop":
            active += 1
        for event in record.events:
            kind = event.get("kind")
            payload = event.get("payload", {})
            if kind == "missed-order":
                missed += 1
            elif kind == "wrong-serve" and payload.get("player") == agent:
                wrong += 1
            elif kind == "delivery":
                deliveries += 1
                gains += payload.get("reward", 0)
                for player in payload.get("key_events", {}).values():
                    if player is None:
                        continue
                    if player == agent:
                        ke_agent += 1
                    else:
                        ke_other += 1

    executed = sum(
        1 for m in log.macros if m.get("player") == agent and m.get("atomics", 0) >= 1
    )
    efficiency = gains / executed if executed else 0.0

    latencies = [c["latency"] for c in log.calls if c.get("player") == agent]
    if latencies:
        mean = statistics.fmean(latencies)
        stderr = (
            statistics.stdev(latencies) / math.sqrt(len(latencies))
            if len(latencies) > 1
            else 0.0
        )
    else:
        mean = stderr = None

    total_ke = ke_agent + ke_other
    contribution = ke_agent / total_ke if total_ke else None

    return MetricsReport(
        agent=agent,
        score=log.final_score,
        atom_action_occupy=active / total_ticks if total_ticks else 0.0,
        failure_missed=missed,
        failure_wrong_serve=wrong,
        score_efficiency=efficiency,
        macros_executed=executed,
        latency_mean=mean,
        latency_stderr=stderr,
        contribution_rate=contribution,
        deliveries=deliveries,
    )
