"""Experiment driver: determinism, replay, batching, CLI plumbing."""

from __future__ import annotations

import json

import pytest

from coopkitchen.errors import ConfigError, ReplayError
from coopkitchen.harness import ExperimentConfig, replay, run_batch, run_episode
from coopkitchen.harness.cli import main as cli_main
from coopkitchen.harness.replay import human_action_stream
from coopkitchen.metrics import EpisodeLog, compute_report, load_episode_log


def test_identical_config_identical_log_hashes():
    cfg = ExperimentConfig(agents=["fsm"], runs=1, seed=7, horizon=200)
    h1 = [r.state_hash for r in run_episode(cfg).ticks]
    h2 = [r.state_hash for r in run_episode(cfg).ticks]
    assert h1 == h2


def test_replay_verifies_untouched_log():
    cfg = ExperimentConfig(agents=["fsm", "rule:lettuce"], runs=1, seed=3, horizon=220)
    log = run_episode(cfg)
    result = replay(log)
    assert result.verified
    assert result.final_score == log.final_score


def test_replay_pinpoints_tampered_tick():
    cfg = ExperimentConfig(agents=["fsm"], runs=1, seed=3, horizon=150)
    log = run_episode(cfg)
    # flip one recorded action mid-episode
    target = 60
    record = log.ticks[target]
    record.actions[0] = "left" if record.actions[0] != "left" else "right"
    result = replay(log)
    assert not result.verified
    assert result.divergence_tick is not None
    assert result.divergence_tick >= target  # divergence is at/after the flip


def test_replay_without_fingerprint_errors():
    log = EpisodeLog(header={})
    with pytest.raises(ReplayError):
        replay(log)


def test_log_round_trip_through_jsonl(tmp_path):
    cfg = ExperimentConfig(agents=["fsm"], runs=1, seed=11, horizon=100)
    log = run_episode(cfg)
    path = log.save(tmp_path / "ep.jsonl")
    loaded = load_episode_log(path)
    assert [r.state_hash for r in loaded.ticks] == [r.state_hash for r in log.ticks]
    assert loaded.final_score == log.final_score
    assert replay(loaded).verified
    assert compute_report(loaded, 0).to_dict() == compute_report(log, 0).to_dict()


def test_report_identical_after_replay_resimulation():
    cfg = ExperimentConfig(agents=["fsm"], runs=1, seed=19, horizon=150)
    log = run_episode(cfg)
    assert replay(log).verified
    # replay equivalence at the metric level: recompute from the same log
    assert compute_report(log, 0).to_dict() == compute_report(log, 0).to_dict()


def test_human_action_stream_extraction():
    cfg = ExperimentConfig(agents=["fsm", "rule:beef"], runs=1, seed=2, horizon=60)
    log = run_episode(cfg)
    stream = human_action_stream(log, seat=1)
    assert len(stream) == 60
    assert set(stream) <= {"up", "down", "left", "right", "interact", "noop"}


def test_batch_aggregates_with_iqm(tmp_path):
    cfg = ExperimentConfig(agents=["fsm"], runs=6, seed=0, horizon=120, out_dir=str(tmp_path))
    result = run_batch(cfg)
    assert result["runs_completed"] == 6
    assert result["failures"] == []
    assert (tmp_path / "batch_summary.json").exists()
    assert len(list(tmp_path.glob("episode_*.jsonl"))) == 6
    score_agg = result["aggregates"]["score"]
    assert score_agg["retained"] == 4  # floor(6/4)=1 trimmed per side
    # per-run seeds differ while the config fingerprint is constant
    headers = [load_episode_log(p).header for p in sorted(tmp_path.glob("episode_*.jsonl"))]
    seeds = {h["seed"] for h in headers}
    assert seeds == {0, 1, 2, 3, 4, 5}
    fingerprints = {h["layout_text"] for h in headers}
    assert len(fingerprints) == 1


def test_single_run_aggregate_is_degraded(tmp_path):
    cfg = ExperimentConfig(agents=["fsm"], runs=1, seed=0, horizon=80, out_dir=str(tmp_path))
    result = run_batch(cfg)
    assert result["aggregates"]["score"]["degraded"] is True


def test_config_validation_rejects_unknowns():
    with pytest.raises(ConfigError):
        ExperimentConfig.from_dict({"layout": "new_counter_circuit", "bogus": 1})
    with pytest.raises(ConfigError):
        ExperimentConfig(agents=["alien"]).validate()
    with pytest.raises(ConfigError):
        ExperimentConfig(mode="warp").validate()


def test_config_file_round_trip(tmp_path):
    path = tmp_path / "exp.yaml"
    path.write_text(
        "layout: new_asymmetric_advantages\nagents: [fsm, rule:beef]\nhorizon: 123\nseed: 9\n",
        encoding="utf-8",
    )
    cfg = ExperimentConfig.from_file(path)
    assert cfg.layout == "new_asymmetric_advantages"
    assert cfg.horizon == 123
    assert cfg.agents == ["fsm", "rule:beef"]


def test_cli_run_replay_report(tmp_path, capsys):
    out = tmp_path / "runs"
    code = cli_main(
        [
            "run",
            "--agent",
            "fsm",
            "--seed",
            "4",
            "--ticks",
            "120",
            "--mode",
            "fast",
            "--runs",
            "1",
            "--out",
            str(out),
        ]
    )
    assert code == 0
    log_path = out / "episode_000.jsonl"
    assert log_path.exists()

    assert cli_main(["replay", "--log", str(log_path)]) == 0

    csv_path = tmp_path / "metrics.csv"
    svg_path = tmp_path / "scores.svg"
    assert cli_main(["report", "--dir", str(out), "--csv", str(csv_path), "--svg", str(svg_path)]) == 0
    assert csv_path.exists()
    assert svg_path.read_text().startswith("<svg")
    capsys.readouterr()


def test_cli_bad_config_is_exit_code_one(capsys):
    assert cli_main(["run", "--agent", "alien"]) == 1
    capsys.readouterr()


def test_mode_equivalence_fast_vs_realtime_short():
    fixture = [
        {"match": "assigned tasks", "response": '```text\nok\n```\n```json\n["BeefBurger"]\n```', "latency": 1.0}
    ]
    from coopkitchen.agents import build_agent
    from coopkitchen.system2 import ScriptedBackend, System2Config

    def run(mode):
        cfg = ExperimentConfig(
            agents=["dpt", "rule:beef"],
            runs=1,
            seed=5,
            horizon=48,
            mode=mode,
            tick_period=0.05,  # short realtime run
            generate_every=20,
            tom_every=0,
            reflect_every=0,
            game={"order_arrivals": [[0, "BeefBurger"]], "tick_period": 0.05},
        )
        agents = [
            build_agent(
                "dpt",
                0,
                backend=ScriptedBackend([dict(line) for line in fixture]),
                s2_config=System2Config(
                    generate_every=20, tom_every=0, reflect_every=0, tick_period=0.05
                ),
            ),
            build_agent("rule:beef", 1),
        ]
        return run_episode(cfg, agents=agents)

    fast = run("fast")
    realtime = run("realtime")
    assert [r.events for r in fast.ticks] == [r.events for r in realtime.ticks]
    assert [r.state_hash for r in fast.ticks] == [r.state_hash for r in realtime.ticks]
    assert [s["tick"] for s in fast.swaps] == [s["tick"] for s in realtime.swaps]
