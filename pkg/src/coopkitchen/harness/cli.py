"""Command-line entry points.

    coopkitchen run --layout new_counter_circuit --agent dpt --partner rule:beef \
        --backend scripted:fixture.jsonl --seed 7 --ticks 500 --mode fast --runs 20 --out runs/
    coopkitchen replay --log runs/episode_000.jsonl
    coopkitchen report --dir runs/ [--csv report.csv] [--svg scores.svg]
    coopkitchen serve --host 127.0.0.1 --port 8000 [--agent dpt --backend scripted:FILE]

Exit codes: 0 ok, 1 configuration error, 2 runtime degradation occurred.
"""

from __future__ import annotations

import argparse
import csv
import json
import sys
from pathlib import Path

from ..errors import ConfigError, CoopKitchenError
from ..metrics import compute_report, iqm_stderr, load_episode_log
from .config import ExperimentConfig
from .replay import replay_log_file
from .runner import AGGREGATE_FIELDS, run_batch, run_episode


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="coopkitchen")
    sub = parser.add_subparsers(dest="command", required=True)

    run = sub.add_parser("run", help="run one or more episodes")
    run.add_argument("--config", help="YAML/JSON experiment config file")
    run.add_argument("--layout", default=None)
    run.add_argument("--agent", default=None, help="seat-0 agent kind")
    run.add_argument("--partner", default=None, help="seat-1 agent kind (optional)")
    run.add_argument("--backend", default=None, help="null | scripted:FILE | http")
    run.add_argument("--base-url", default=None)
    run.add_argument("--model", default=None)
    run.add_argument("--seed", type=int, default=None)
    run.add_argument("--ticks", type=int, default=None)
    run.add_argument("--mode", choices=("fast", "realtime"), default=None)
    run.add_argument("--runs", type=int, default=None)
    run.add_argument("--out", default=None)

    rep = sub.add_parser("replay", help="verify a stored episode log")
    rep.add_argument("--log", required=True)

    report = sub.add_parser("report", help="aggregate reports from a run directory")
    report.add_argument("--dir", required=True)
    report.add_argument("--csv", default=None, help="write per-run metrics as CSV")
    report.add_argument("--svg", default=None, help="write score curves as a simple SVG")

    serve = sub.add_parser("serve", help="start the live human-play server")
    serve.add_argument("--host", default="127.0.0.1")
    serve.add_argument("--port", type=int, default=8000)
    serve.add_argument("--agent", default="fsm")
    serve.add_argument("--backend", default="null")
    serve.add_argument("--layout", default="new_counter_circuit")
    serve.add_argument("--mode", choices=("fast", "realtime"), default="realtime")
    return parser


def _config_from_args(args) -> ExperimentConfig:
    if args.config:
        config = ExperimentConfig.from_file(args.config)
    else:
        config = ExperimentConfig()
    if args.layout is not None:
        config.layout = args.layout
    if args.agent is not None:
        config.agents = [args.agent]
    if args.partner is not None:
        if len(config.agents) == 1:
            config.agents.append(args.partner)
        else:
            config.agents[1] = args.partner
    if args.backend is not None:
        config.backend = args.backend
    if args.base_url is not None:
        config.base_url = args.base_url
    if args.model is not None:
        config.model = args.model
    if args.seed is not None:
        config.seed = args.seed
    if args.ticks is not None:
        config.horizon = args.ticks
    if args.mode is not None:
        config.mode = args.mode
    if args.runs is not None:
        config.runs = args.runs
    if args.out is not None:
        config.out_dir = args.out
    config.validate()
    return config


def _cmd_run(args) -> int:
    config = _config_from_args(args)
    if config.runs == 1:
        log = run_episode(config)
        out = Path(config.out_dir or "runs")
        out.mkdir(parents=True, exist_ok=True)
        path = log.save(out / "episode_000.jsonl")
        report = compute_report(log, agent=0)
        print(report.render_table())
        print(f"log: {path}")
        degraded = any(c.get("outcome") != "ok" for c in log.calls)
        return 2 if degraded else 0
    result = run_batch(config)
    print(json.dumps(result["aggregates"], indent=2))
    print(f"completed {result['runs_completed']}/{config.runs} runs")
    return 2 if result["failures"] else 0


def _cmd_replay(args) -> int:
    result = replay_log_file(args.log)
    print(result.summary())
    return 0 if result.verified else 2


def _cmd_report(args) -> int:
    directory = Path(args.dir)
    logs = sorted(directory.glob("episode_*.jsonl"))
    if not logs:
        raise ConfigError(f"no episode logs under {directory}")
    reports = [compute_report(load_episode_log(p), agent=0) for p in logs]

    print(f"{'metric':22} {'iqm':>10} {'stderr':>10} {'n':>4}")
    for field_name in AGGREGATE_FIELDS:
        values = [getattr(r, field_name) for r in reports]
        agg = iqm_stderr(values)
        flag = " (degraded)" if agg.degraded else ""
        print(f"{field_name:22} {agg.iqm:10.3f} {agg.stderr:10.3f} {agg.retained:4d}{flag}")

    if args.csv:
        with open(args.csv, "w", newline="", encoding="utf-8") as fp:
            writer = csv.DictWriter(fp, fieldnames=list(reports[0].to_dict()))
            writer.writeheader()
            for r in reports:
                writer.writerow(r.to_dict())
        print(f"csv: {args.csv}")

    if args.svg:
        _write_score_svg(logs, Path(args.svg))
        print(f"svg: {args.svg}")
    return 0


def _write_score_svg(log_paths: list[Path], out: Path) -> None:
    """Minimal score-over-time polylines, one per episode (display only)."""
    width, height, pad = 640, 360, 40
    curves = []
    low, high, max_t = 0, 1, 1
    for path in log_paths:
        log = load_episode_log(path)
        points = [(rec.tick, rec.score) for rec in log.ticks]
        if not points:
            continue
        curves.append(points)
        low = min(low, min(s for _, s in points))
        high = max(high, max(s for _, s in points))
        max_t = max(max_t, points[-1][0] or 1)
    span = max(1, high - low)
    parts = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}">',
        f'<rect width="{width}" height="{height}" fill="white"/>',
    ]
    for i, points in enumerate(curves):
        coords = " ".join(
            f"{pad + (width - 2 * pad) * t / max_t:.1f},"
            f"{height - pad - (height - 2 * pad) * (s - low) / span:.1f}"
            for t, s in points
        )
        hue = (i * 47) % 360
        parts.append(
            f'<polyline points="{coords}" fill="none" stroke="hsl({hue},70%,45%)" stroke-width="1"/>'
        )
    parts.append(
        f'<text x="{pad}" y="{height - 8}" font-size="12">ticks →  (score range {low}..{high})</text>'
    )
    parts.append("</svg>")
    out.write_text("\n".join(parts), encoding="utf-8")


def _cmd_serve(args) -> int:
    import uvicorn

    from ..server.app import create_app

    config = ExperimentConfig(
        layout=args.layout,
        agents=[args.agent, "human"],
        backend=args.backend,
        mode=args.mode,
        runs=1,
    )
    config.validate()
    app = create_app(config)
    uvicorn.run(app, host=args.host, port=args.port, log_level="warning")
    return 0


def main(argv: list[str] | None = None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    try:
        if args.command == "run":
            return _cmd_run(args)
        if args.command == "replay":
            return _cmd_replay(args)
        if args.command == "report":
            return _cmd_report(args)
        if args.command == "serve":
            return _cmd_serve(args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 1
    except CoopKitchenError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    return 0


if __name__ == "__main__":
    sys.exit(main())
