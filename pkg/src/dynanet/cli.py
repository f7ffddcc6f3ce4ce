"""Command line entry point: ``dynanet run | verify | replay | stats``.

Files written by ``run`` into the output directory:

* ``trace_seed<S>.jsonl`` one trace per seed (see :mod:`dynanet.tracefile`),
* ``metrics.csv`` one row per (seed, round) with the columns in
  :data:`dynanet.experiment.METRIC_COLUMNS`,
* ``verify.json`` when ``--properties`` is given.

``DYNANET_THREADS`` caps how many seeds run in parallel (worker processes).
"""

from __future__ import annotations

import argparse
import csv
import json
import os
import statistics
import sys
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path
from typing import Sequence

from dynanet.adversaries import ReplayAdversary, read_replay
from dynanet.config import ExperimentConfig
from dynanet.engine import EngineConfig, run
from dynanet.experiment import (
    METRIC_COLUMNS,
    PROPERTIES,
    algorithm_factory,
    codec_for,
    metrics_rows,
    run_config,
    verify_trace,
)
from dynanet.tracefile import dumps_trace, loads_trace, read_trace

DECAY_MIN_EDGES = 50


def parse_seeds(text: str) -> list[int]:
    """``"1,2,5"`` or ``"1..10"`` (inclusive) or a mix of both."""
    seeds: list[int] = []
    for part in text.split(","):
        part = part.strip()
        if not part:
            continue
        if ".." in part:
            lo, hi = part.split("..")
            seeds.extend(range(int(lo), int(hi) + 1))
        else:
            seeds.append(int(part))
    return seeds


def parse_properties(text: str | None) -> list[str]:
    if not text:
        return []
    props = [p.strip() for p in text.split(",") if p.strip()]
    for p in props:
        if p not in PROPERTIES:
            raise argparse.ArgumentTypeError(f"unknown property {p!r}; choose from {', '.join(PROPERTIES)}")
    return props


def worker_count(jobs: int) -> int:
    env = os.environ.get("DYNANET_THREADS")
    cap = int(env) if env else (os.cpu_count() or 1)
    return max(1, min(cap, jobs))


def _run_one(cfg: ExperimentConfig, seed: int):
    # traces travel between processes as their JSONL text
    trace = run_config(cfg, seed)
    rows = metrics_rows(trace, seed, cfg.T1, cfg.problem, with_h=cfg.problem == "mis")
    return seed, dumps_trace(trace), rows


def _map_seeds(fn, cfg: ExperimentConfig, seeds: Sequence[int]) -> list:
    workers = worker_count(len(seeds))
    if workers == 1:
        return [fn(cfg, s) for s in seeds]
    with ProcessPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, [cfg] * len(seeds), seeds))


def report_json(entries: list[dict]) -> str:
    return json.dumps(entries, separators=(",", ":"), sort_keys=True) + "\n"


def build_report(traces, properties: Sequence[str], window: int | None = None, from_round: int | None = None):
    """Report entries for ``(label, trace)`` pairs plus the number of traces with a failed check."""
    entries = []
    failed = 0
    for label, trace in traces:
        bad = False
        for v in verify_trace(trace, properties, T=window, from_round=from_round):
            entry = v.to_json()
            entry["seed"] = label
            entries.append(entry)
            if not v.ok and not v.vacuous:
                bad = True
        failed += bad
    return entries, failed


def write_metrics(path: Path, rows: list[dict]) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.DictWriter(fh, fieldnames=METRIC_COLUMNS, lineterminator="\n")
        w.writeheader()
        w.writerows(rows)


def cmd_run(args) -> int:
    cfg = ExperimentConfig.load(args.config)
    updates = {}
    if args.seeds:
        updates["seeds"] = parse_seeds(args.seeds)
    if args.seed is not None:
        updates["seeds"] = [args.seed]
    if args.rounds is not None:
        updates["rounds"] = args.rounds
    if args.out_dir:
        updates["out_dir"] = args.out_dir
    if updates:
        cfg = ExperimentConfig.model_validate({**cfg.model_dump(), **updates})
    out = Path(cfg.out_dir)
    out.mkdir(parents=True, exist_ok=True)

    results = _map_seeds(_run_one, cfg, cfg.seeds)
    rows = []
    for seed, text, seed_rows in results:
        if cfg.record.trace:
            (out / f"trace_seed{seed}.jsonl").write_text(text)
        rows.extend(seed_rows)
    if cfg.record.metrics:
        write_metrics(out / "metrics.csv", rows)

    props = parse_properties(args.properties)
    if not props:
        return 0
    entries, failed = build_report([(seed, loads_trace(text)) for seed, text, _ in results], props)
    (out / "verify.json").write_text(report_json(entries))
    print(f"{failed} of {len(results)} traces failed a check", file=sys.stderr)
    return 0 if failed <= args.fail_budget else 1


def cmd_verify(args) -> int:
    props = parse_properties(args.properties) or ["t_dynamic"]
    traces = []
    for path in args.traces:
        trace = read_trace(path)
        traces.append((trace.meta.get("seed"), trace))
    entries, failed = build_report(traces, props, window=args.window, from_round=args.from_round)
    text = report_json(entries)
    if args.out:
        Path(args.out).write_text(text)
    else:
        sys.stdout.write(text)
    print(f"{failed} of {len(traces)} traces failed a check", file=sys.stderr)
    return 0 if failed <= args.fail_budget else 1


def replay_trace(path: str | Path, seed: int | None = None):
    """Re-runs the trace's algorithm on its recorded graph sequence; meta is carried over."""
    source = read_trace(path)
    meta = dict(source.meta)
    if seed is not None:
        meta["seed"] = seed
    cfg = EngineConfig(n=meta["n"], seed=meta["seed"])
    trace = run(
        cfg,
        ReplayAdversary(read_replay(path)),
        algorithm_factory(meta["algorithm"], meta["n"], meta["T1"]),
        max(1, source.rounds),
        codec=codec_for(meta["algorithm"]),
    )
    trace.meta = meta
    return trace


def cmd_replay(args) -> int:
    out = Path(args.out_dir or ".")
    out.mkdir(parents=True, exist_ok=True)
    results = []
    for path in args.traces:
        trace = replay_trace(path, args.seed)
        target = out / ("replay_" + Path(path).name)
        text = dumps_trace(trace)
        target.write_text(text)
        results.append((trace.meta.get("seed"), loads_trace(text)))
    props = parse_properties(args.properties)
    if not props:
        return 0
    entries, failed = build_report(results, props)
    (out / "verify.json").write_text(report_json(entries))
    return 0 if failed <= args.fail_budget else 1


def _percentile(values: list[int], q: int):
    if len(values) == 1:
        return values[0]
    return statistics.quantiles(values, n=100, method="inclusive")[q - 1]


def summarize(rows: list[dict]) -> dict:
    """Convergence percentiles, mean edge-decay ratio and pass rates of a metrics CSV.

    A seed converges at the first round from which ``undecided`` stays 0 to the
    end of its run. It passes when its last round has no undecided node, no
    intersection conflict and no covering violation. The decay ratio is
    ``h[r+2] / h[r]`` pooled over all seeds and rounds with ``h[r] >= 50``.
    """
    if not rows:
        return {}
    per_seed: dict[int, list[dict]] = {}
    for row in rows:
        per_seed.setdefault(int(row["seed"]), []).append(row)
    converged = []
    passed = 0
    ratios = []
    for seed_rows in per_seed.values():
        seed_rows.sort(key=lambda row: int(row["round"]))
        conv = None
        for row in seed_rows:
            if int(row["undecided"]) == 0:
                conv = int(row["round"]) if conv is None else conv
            else:
                conv = None
        if conv is not None:
            converged.append(conv)
        last = seed_rows[-1]
        if all(int(last[c]) == 0 for c in ("undecided", "conflicts_cap", "covering_violations")):
            passed += 1
        h = {int(row["round"]): int(row["h_edges"]) for row in seed_rows if row.get("h_edges") not in (None, "")}
        for r, value in h.items():
            if value >= DECAY_MIN_EDGES and r + 2 in h:
                ratios.append(h[r + 2] / value)
    seeds = len(per_seed)
    summary: dict = {
        "seeds": seeds,
        "converged": len(converged),
        "pass_rate": passed / seeds,
        "convergence_rate": len(converged) / seeds,
    }
    if converged:
        converged.sort()
        summary["convergence_round"] = {f"p{q}": _percentile(converged, q) for q in (50, 90, 99)}
    if ratios:
        summary["decay"] = {"samples": len(ratios), "mean_ratio": statistics.fmean(ratios)}
    return summary


def cmd_stats(args) -> int:
    with open(args.metrics, newline="") as fh:
        rows = list(csv.DictReader(fh))
    print(json.dumps(summarize(rows), indent=2, sort_keys=True))
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="dynanet", description="Dynamic-network simulator for local graph problems.")
    sub = parser.add_subparsers(dest="command", required=True)

    def budget(p):
        p.add_argument("--fail-budget", type=int, default=0, help="traces allowed to fail before exiting non-zero")

    p = sub.add_parser("run", help="run an experiment config")
    p.add_argument("--config", required=True)
    p.add_argument("--seed", type=int)
    p.add_argument("--seeds", help='e.g. "1,2,3" or "1..100"')
    p.add_argument("--rounds", type=int)
    p.add_argument("--out-dir")
    p.add_argument("--properties", help=f"inline verification: comma list of {', '.join(PROPERTIES)}")
    budget(p)
    p.set_defaults(func=cmd_run)

    p = sub.add_parser("verify", help="check recorded traces")
    p.add_argument("traces", nargs="+")
    p.add_argument("--properties", help=f"comma list of {', '.join(PROPERTIES)} (default t_dynamic)")
    p.add_argument("--window", type=int, help="T for t_dynamic (default the trace's T1)")
    p.add_argument("--from-round", type=int, help="first round checked by t_dynamic (default T1 + T2)")
    p.add_argument("--out", help="report path (default stdout)")
    budget(p)
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("replay", help="re-run traces on their recorded graph sequences")
    p.add_argument("traces", nargs="+")
    p.add_argument("--seed", type=int, help="node randomness seed (default the recorded one)")
    p.add_argument("--out-dir")
    p.add_argument("--properties")
    budget(p)
    p.set_defaults(func=cmd_replay)

    p = sub.add_parser("stats", help="summarize a metrics CSV")
    p.add_argument("metrics")
    p.set_defaults(func=cmd_stats)
    return parser


def main(argv: Sequence[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except argparse.ArgumentTypeError as exc:
        print(f"dynanet: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
