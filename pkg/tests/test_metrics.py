"""Metric formulas vs straight-line recomputation on synthetic logs."""

from __future__ import annotations

import math
import random
import statistics

import pytest

from coopkitchen.errors import ValidationError
from coopkitchen.metrics import (
    EpisodeLog,
    TickLogRecord,
    borda,
    compute_report,
    iqm_stderr,
)

KEY_EVENT_SETS = {
    "BeefBurger": ["Cook Beef", "Use Beef", "Use Bread", "Use Plate", "Serve"],
    "LettuceBurger": ["Prepare Lettuce", "Use Lettuce", "Use Bread", "Use Plate", "Serve"],
    "BeefLettuceBurger": [
        "Cook Beef",
        "Use Beef",
        "Prepare Lettuce",
        "Use Lettuce",
        "Use Bread",
        "Use Plate",
        "Serve",
    ],
}
REWARDS = {"BeefBurger": 20, "LettuceBurger": 15, "BeefLettuceBurger": 25}


def synthetic_log(rng: random.Random, ticks: int = 20) -> EpisodeLog:
    log = EpisodeLog(header={"players": 2})
    score = 0
    macro_id = 0
    for t in range(ticks):
        actions = [rng.choice(["up", "down", "left", "right", "interact", "noop"]) for _ in range(2)]
        events = []
        roll = rng.random()
        if roll < 0.15:
            name = rng.choice(list(REWARDS))
            key_events = {
                label: rng.choice([0, 1, None]) for label in KEY_EVENT_SETS[name]
            }
            reward = REWARDS[name]
            score += reward
            events.append(
                {
                    "tick": t,
                    "kind": "delivery",
                    "payload": {
                        "name": name,
                        "reward": reward,
                        "player": rng.choice([0, 1]),
                        "key_events": key_events,
                    },
                }
            )
        elif roll < 0.25:
            score -= 10
            events.append(
                {"tick": t, "kind": "missed-order", "payload": {"name": "BeefBurger", "reward": -10}}
            )
        elif roll < 0.3:
            score -= 10
            events.append(
                {
                    "tick": t,
                    "kind": "wrong-serve",
                    "payload": {"player": rng.choice([0, 1]), "reward": -10, "item": ["Bread", ""]},
                }
            )
        log.ticks.append(
            TickLogRecord(tick=t, actions=actions, events=events, score=score, state_hash=f"h{t}")
        )
    for player in (0, 1):
        for _ in range(rng.randint(0, 6)):
            log.macros.append(
                {
                    "player": player,
                    "macro": ["prepare", {}],
                    "issued": rng.randrange(ticks),
                    "atomics": rng.choice([0, 1, 5]),
                    "outcome": "done",
                }
            )
            macro_id += 1
    for player in (0, 1):
        for _ in range(rng.randint(0, 4)):
            log.calls.append(
                {"player": player, "job": "generate", "latency": rng.uniform(0.1, 3.0),
                 "request_tick": rng.randrange(ticks), "outcome": "ok"}
            )
    log.footer = {"final_score": score}
    return log


def oracle_report(log: EpisodeLog, agent: int) -> dict:
    """Independent straight-line recomputation of every report field."""
    ticks = log.ticks
    active = sum(1 for r in ticks if r.actions[agent] != "noop")
    occupy = active / len(ticks) if ticks else 0.0
    missed = sum(1 for r in ticks for e in r.events if e["kind"] == "missed-order")
    wrong = sum(
        1
        for r in ticks
        for e in r.events
        if e["kind"] == "wrong-serve" and e["payload"]["player"] == agent
    )
    gains = sum(
        e["payload"]["reward"]
        for r in ticks
        for e in r.events
        if e["kind"] == "delivery"
    )
    executed = sum(1 for m in log.macros if m["player"] == agent and m["atomics"] >= 1)
    efficiency = gains / executed if executed else 0.0
    ke_a = ke_h = 0
    for r in ticks:
        for e in r.events:
            if e["kind"] != "delivery":
                continue
            for who in e["payload"]["key_events"].values():
                if who is None:
                    continue
                if who == agent:
                    ke_a += 1
                else:
                    ke_h += 1
    contribution = ke_a / (ke_a + ke_h) if (ke_a + ke_h) else None
    lats = [c["latency"] for c in log.calls if c["player"] == agent]
    lat_mean = statistics.fmean(lats) if lats else None
    return {
        "score": log.footer["final_score"],
        "atom_action_occupy": occupy,
        "failure_missed": missed,
        "failure_wrong_serve": wrong,
        "score_efficiency": efficiency,
        "contribution_rate": contribution,
        "latency_mean": lat_mean,
    }


def test_report_matches_oracle_on_100_random_logs():
    rng = random.Random(2024)
    for i in range(100):
        log = synthetic_log(rng, ticks=rng.randint(5, 20))
        for agent in (0, 1):
            report = compute_report(log, agent)
            expected = oracle_report(log, agent)
            for field, value in expected.items():
                got = getattr(report, field)
                if value is None:
                    assert got is None, (i, agent, field)
                else:
                    assert got == pytest.approx(value), (i, agent, field)


def test_occupy_direct_formula():
    log = EpisodeLog(header={"players": 1})
    for t in range(500):
        action = "interact" if t < 450 else "noop"
        log.ticks.append(TickLogRecord(tick=t, actions=[action], events=[], score=0, state_hash=""))
    log.footer = {"final_score": 0}
    assert compute_report(log, 0).atom_action_occupy == pytest.approx(0.9)


def test_score_efficiency_direct_formula():
    log = EpisodeLog(header={"players": 1})
    events = [
        {"tick": 0, "kind": "delivery", "payload": {"name": n, "reward": r, "player": 0, "key_events": {}}}
        for n, r in (("LettuceBurger", 15), ("BeefBurger", 20), ("BeefLettuceBurger", 25))
    ]
    log.ticks.append(TickLogRecord(tick=0, actions=["interact"], events=events, score=60, state_hash=""))
    log.macros = [
        {"player": 0, "macro": ["serve", {}], "issued": 0, "atomics": 2, "outcome": "done"}
        for _ in range(12)
    ]
    log.footer = {"final_score": 60}
    assert compute_report(log, 0).score_efficiency == pytest.approx(5.0)


def test_contribution_rate_hand_attribution():
    # agent cooked and plated the beef and fetched the plate; the partner
    # used the bread and served: 3 of 5 key events
    log = EpisodeLog(header={"players": 2})
    key_events = {"Cook Beef": 0, "Use Beef": 0, "Use Plate": 0, "Use Bread": 1, "Serve": 1}
    log.ticks.append(
        TickLogRecord(
            tick=0,
            actions=["interact", "interact"],
            events=[
                {
                    "tick": 0,
                    "kind": "delivery",
                    "payload": {"name": "BeefBurger", "reward": 20, "player": 1, "key_events": key_events},
                }
            ],
            score=20,
            state_hash="",
        )
    )
    log.footer = {"final_score": 20}
    assert compute_report(log, 0).contribution_rate == pytest.approx(0.6)
    assert compute_report(log, 1).contribution_rate == pytest.approx(0.4)


def test_sole_worker_contribution_is_one():
    log = EpisodeLog(header={"players": 2})
    key_events = {label: 0 for label in KEY_EVENT_SETS["BeefBurger"]}
    log.ticks.append(
        TickLogRecord(
            tick=0,
            actions=["interact", "noop"],
            events=[
                {
                    "tick": 0,
                    "kind": "delivery",
                    "payload": {"name": "BeefBurger", "reward": 20, "player": 0, "key_events": key_events},
                }
            ],
            score=20,
            state_hash="",
        )
    )
    log.footer = {"final_score": 20}
    assert compute_report(log, 0).contribution_rate == pytest.approx(1.0)


def test_zero_macros_efficiency_and_absent_contribution():
    log = EpisodeLog(header={"players": 1})
    log.ticks.append(TickLogRecord(tick=0, actions=["noop"], events=[], score=0, state_hash=""))
    log.footer = {"final_score": 0}
    report = compute_report(log, 0)
    assert report.score_efficiency == 0.0
    assert report.contribution_rate is None


def test_complementarity_of_contribution_rates():
    rng = random.Random(7)
    for _ in range(20):
        log = synthetic_log(rng)
        r0 = compute_report(log, 0)
        r1 = compute_report(log, 1)
        if r0.contribution_rate is not None and r1.contribution_rate is not None:
            assert r0.contribution_rate + r1.contribution_rate == pytest.approx(1.0)


# --- aggregation -------------------------------------------------------------


def test_iqm_of_one_to_twenty_is_ten_point_five():
    agg = iqm_stderr(list(range(1, 21)))
    assert agg.iqm == pytest.approx(10.5)
    middle = list(range(6, 16))
    assert agg.stderr == pytest.approx(statistics.stdev(middle) / math.sqrt(10))
    assert agg.retained == 10
    assert not agg.degraded


def test_iqm_constant_list():
    agg = iqm_stderr([4.0] * 8)
    assert agg.as_tuple() == (4.0, 0.0)


def test_iqm_under_four_values_degrades_to_plain_mean():
    agg = iqm_stderr([1.0, 2.0, 6.0])
    assert agg.degraded
    assert agg.iqm == pytest.approx(3.0)


def test_iqm_rejects_empty():
    with pytest.raises(ValidationError):
        iqm_stderr([])


def test_borda_single_ranking():
    scores = borda([["A", "B", "C", "D"]])
    assert scores == {"A": 4, "B": 3, "C": 2, "D": 1}


def test_borda_opposite_rankings_tie():
    scores = borda([["A", "B", "C", "D"], ["D", "C", "B", "A"]])
    assert set(scores.values()) == {5}


def test_borda_conservation_over_many_rankings():
    rng = random.Random(3)
    items = ["w", "x", "y", "z"]
    rankings = [rng.sample(items, 4) for _ in range(36)]
    scores = borda(rankings)
    assert sum(scores.values()) == 36 * 10  # k(k+1)/2 = 10 per ranking


def test_borda_rejects_non_permutation():
    with pytest.raises(ValidationError):
        borda([["A", "A", "B", "C"]])
    with pytest.raises(ValidationError):
        borda([["A", "B"], ["B", "C"]])
