"""Builds runs from an :class:`ExperimentConfig` and turns traces into metrics rows."""

from __future__ import annotations

from typing import Any, Callable, Sequence

from dynanet.adversaries import (
    ChurnAdversary,
    LocallyStaticAdversary,
    ReplayAdversary,
    StaticAdversary,
    WakeScheduleWrapper,
    complete_edges,
    gnp_edges,
)
from dynanet.coloring import BasicColoring, ColorCodec, DColor, SColor
from dynanet.config import AdversarySpec, BaseGraphSpec, ExperimentConfig, problem_of
from dynanet.engine import EngineConfig, Monitor, RoundTrace, run
from dynanet.framework import Concat, ConcatCodec
from dynanet.graph_core import Edge, WindowState
from dynanet.mis import DOMINATED, MIS, DMis, MisCodec, SMis
from dynanet.rng import SeedPlan
from dynanet.verifier import (
    COLORING,
    Verdict,
    check_locally_static,
    check_partial,
    coloring_covering,
    coloring_packing,
    mis_covering,
    mis_packing,
    static_intervals,
    t_dynamic_verdicts,
)

METRIC_COLUMNS = (
    "seed",
    "round",
    "awake",
    "undecided",
    "conflicts_cap",
    "covering_violations",
    "h_edges",
    "palette_min",
)


def base_edges(spec: BaseGraphSpec, n: int, seed: int) -> frozenset[Edge]:
    if spec.kind == "complete":
        return complete_edges(n)
    if spec.kind == "edges":
        return frozenset((min(u, v), max(u, v)) for u, v in spec.edges)
    if spec.kind == "empty":
        return frozenset()
    graph_seed = spec.seed if spec.seed is not None else SeedPlan(seed).graph_seed()
    return gnp_edges(n, spec.p, graph_seed)


def build_adversary(spec: AdversarySpec, n: int, seed: int):
    if spec.kind == "static":
        return StaticAdversary(n, base_edges(spec.base, n, seed))
    if spec.kind == "churn":
        return ChurnAdversary(n, base_edges(spec.base, n, seed), spec.p_add, spec.p_del, spec.start_full)
    if spec.kind == "replay":
        return ReplayAdversary(spec.path)
    inner = build_adversary(spec.inner, n, seed)
    if spec.kind == "locally_static":
        return LocallyStaticAdversary(inner, spec.node, spec.alpha, spec.start, spec.end)
    return WakeScheduleWrapper(inner, spec.schedule)


def algorithm_factory(algorithm: str, n: int, T1: int) -> Callable[[int], Any]:
    factories = {
        "basic_coloring": lambda v: BasicColoring(),
        "scolor_only": lambda v: SColor(),
        "dcolor_only": lambda v: DColor(),
        "concat_coloring": lambda v: Concat(SColor(), DColor, T1),
        "smis_only": lambda v: SMis(n),
        "dmis_only": lambda v: DMis(),
        "concat_mis": lambda v: Concat(SMis(n), DMis, T1),
    }
    return factories[algorithm]


def codec_for(algorithm: str):
    inner = MisCodec() if problem_of(algorithm) == "mis" else ColorCodec()
    if algorithm.startswith("concat"):
        return ConcatCodec(inner, inner)
    return inner


class PaletteMonitor:
    """Smallest palette among uncolored single-tier coloring nodes, per round."""

    def __init__(self) -> None:
        self.per_round: dict[int, int] = {}

    def __call__(self, r, snap, nodes, outs) -> None:
        sizes = [
            len(node.palette)
            for node in nodes.values()
            if getattr(node, "phi", 0) is None and getattr(node, "started", True)
        ]
        if sizes:
            self.per_round[r] = min(sizes)


def run_config(
    cfg: ExperimentConfig,
    seed: int,
    monitors: Sequence[Monitor] = (),
    *,
    wire: bool = False,
    node_salt: int = 0,
    adversary=None,
) -> RoundTrace:
    if adversary is None:
        adversary = build_adversary(cfg.adversary, cfg.n, seed)
    engine_cfg = EngineConfig(n=cfg.n, seed=seed, rho=cfg.adversary.rho, wire=wire, node_salt=node_salt)
    palette = PaletteMonitor()
    mons = list(monitors)
    if cfg.problem == "coloring" and not cfg.algorithm.startswith("concat"):
        mons.append(palette)
    trace = run(
        engine_cfg,
        adversary,
        algorithm_factory(cfg.algorithm, cfg.n, cfg.T1),
        cfg.rounds,
        monitors=mons,
        codec=codec_for(cfg.algorithm),
    )
    for r, size in palette.per_round.items():
        trace.metrics[r]["palette_min"] = size
    trace.meta = {
        "algorithm": cfg.algorithm,
        "problem": cfg.problem,
        "n": cfg.n,
        "rounds": cfg.rounds,
        "T1": cfg.T1,
        "T2": cfg.T2,
        "seed": seed,
        "adversary": cfg.adversary.model_dump(exclude_defaults=True),
    }
    return trace


def undecided_edges(running: frozenset[Edge], before: dict[int, Any], awake: set[int]) -> int:
    """Edges of the running intersection graph whose endpoints were both undecided entering the round."""
    return sum(
        1
        for u, v in running
        if u in awake and v in awake and before.get(u) is None and before.get(v) is None
    )


def metrics_rows(trace: RoundTrace, seed: int, T: int, problem: str, with_h: bool = False) -> list[dict]:
    rows = []
    ws = WindowState(T)
    running: frozenset | None = None
    for r in range(1, trace.rounds + 1):
        snap = trace.history[r]
        ws.advance(snap)
        outs = trace.outputs[r]
        cap = ws.intersection_graph()
        cup = ws.union_graph()
        packing = Verdict("packing", r)
        covering = Verdict("covering", r)
        if problem == COLORING:
            coloring_packing(cap, outs, packing)
            coloring_covering(cup, outs, covering)
        else:
            mis_packing(cap, outs, packing)
            mis_covering(cup, outs, covering)
        h_edges: int | str = ""
        if with_h:
            running = snap.edges if running is None else running & snap.edges
            prev = trace.outputs[r - 1]
            # nodes waking this round enter undecided
            h_edges = undecided_edges(running, prev, set(snap.active))
        rows.append(
            {
                "seed": seed,
                "round": r,
                "awake": len(snap.active),
                "undecided": sum(1 for v in snap.active if outs.get(v) is None),
                "conflicts_cap": len(packing.violations),
                "covering_violations": len(covering.violations),
                "h_edges": h_edges,
                "palette_min": trace.metrics[r].get("palette_min", ""),
            }
        )
    return rows


PROPERTIES = ("t_dynamic", "partial", "locally_static")


def verify_trace(
    trace: RoundTrace,
    properties: Sequence[str],
    T: int | None = None,
    from_round: int | None = None,
    alpha: int = 2,
) -> list[Verdict]:
    """Verdicts for one recorded trace.

    ``t_dynamic`` uses window ``T`` (default the trace's T1) and skips rounds
    before ``from_round`` (default T1 + T2, the framework's warm-up).
    ``locally_static`` only reports intervals long enough to be checked.
    """
    meta = trace.meta
    problem = meta.get("problem") or problem_of(meta["algorithm"])
    T1, T2 = meta["T1"], meta["T2"]
    T = T1 if T is None else T
    from_round = T1 + T2 if from_round is None else from_round
    out: list[Verdict] = []
    for prop in properties:
        if prop == "t_dynamic":
            out.extend(t_dynamic_verdicts(trace, T, problem, from_round))
        elif prop == "partial":
            for r in range(1, trace.rounds + 1):
                v = check_partial(trace.history[r], trace.outputs[r], problem)
                v.property = "partial"
                out.append(v)
        elif prop == "locally_static":
            for interval in static_intervals(trace.history, alpha):
                v = check_locally_static(trace, interval, T1, T2)
                if not v.vacuous:
                    out.append(v)
        else:
            raise ValueError(f"unknown property {prop!r}")
    return out
