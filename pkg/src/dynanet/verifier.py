"""Checkers for partial, T-dynamic and locally-static solutions, plus run-time monitors."""

from __future__ import annotations

from dataclasses import asdict, dataclass, field
from fractions import Fraction
from typing import Any, Iterable, Mapping

from dynanet.engine import RoundTrace
from dynanet.graph_core import GraphHistory, GraphSnapshot, WindowState, ball, same_ball, window_at
from dynanet.mis import DOMINATED, MIS

COLORING = "coloring"
MIS_PROBLEM = "mis"


@dataclass
class Verdict:
    property: str
    round: int
    ok: bool = True
    violations: list[tuple[Any, str]] = field(default_factory=list)
    vacuous: bool = False
    # what was checked when it is not the whole round (locally_static: [node, start, end])
    subject: Any = None

    def fail(self, where: Any, reason: str) -> None:
        self.ok = False
        self.violations.append((where, reason))

    def to_json(self) -> dict:
        d = asdict(self)
        d["violations"] = [[list(w) if isinstance(w, tuple) else w, why] for w, why in self.violations]
        return d


@dataclass(frozen=True)
class StaticInterval:
    node: int
    alpha: int
    start: int
    end: int


# -- static / partial checks ------------------------------------------------
# The four building blocks append to a caller-owned verdict so they can be
# combined over different graphs (packing on the intersection graph, covering on the union).


def coloring_packing(graph: GraphSnapshot, phi: Mapping[int, Any], verdict: Verdict) -> None:
    for u, v in sorted(graph.edges):
        cu = phi.get(u)
        if cu is not None and cu == phi.get(v):
            verdict.fail((u, v), f"both endpoints colored {cu}")


def coloring_covering(graph: GraphSnapshot, phi: Mapping[int, Any], verdict: Verdict) -> None:
    for v in sorted(graph.active):
        c = phi.get(v)
        if c is not None and not 1 <= c <= graph.degree(v) + 1:
            verdict.fail(v, f"color {c} outside [1, {graph.degree(v) + 1}]")


def mis_packing(graph: GraphSnapshot, states: Mapping[int, Any], verdict: Verdict) -> None:
    for u, v in sorted(graph.edges):
        if states.get(u) == MIS and states.get(v) == MIS:
            verdict.fail((u, v), "adjacent MIS nodes")


def mis_covering(graph: GraphSnapshot, states: Mapping[int, Any], verdict: Verdict) -> None:
    adj = graph.adjacency
    for v in sorted(graph.active):
        if states.get(v) == DOMINATED and not any(states.get(u) == MIS for u in adj[v]):
            verdict.fail(v, "dominated without an MIS neighbor")


def check_partial_coloring(graph: GraphSnapshot, phi: Mapping[int, Any]) -> Verdict:
    verdict = Verdict("partial_coloring", graph.round)
    coloring_packing(graph, phi, verdict)
    coloring_covering(graph, phi, verdict)
    return verdict


def check_partial_mis(graph: GraphSnapshot, states: Mapping[int, Any]) -> Verdict:
    verdict = Verdict("partial_mis", graph.round)
    mis_packing(graph, states, verdict)
    mis_covering(graph, states, verdict)
    return verdict


def check_partial(graph: GraphSnapshot, outputs: Mapping[int, Any], problem: str) -> Verdict:
    if problem == COLORING:
        return check_partial_coloring(graph, outputs)
    return check_partial_mis(graph, outputs)


# -- T-dynamic ----------------------------------------------------------------


def check_window(ws: WindowState, outputs: Mapping[int, Any], problem: str) -> Verdict:
    """T-dynamic check against an already-advanced window state."""
    cap = ws.intersection_graph()
    cup = ws.union_graph()
    verdict = Verdict("t_dynamic", ws.current_round, vacuous=not cap.active)
    for v in sorted(cap.active):
        if outputs.get(v) is None:
            verdict.fail(v, "no output")
    if problem == COLORING:
        coloring_packing(cap, outputs, verdict)
        coloring_covering(cup, outputs, verdict)
    else:
        mis_packing(cap, outputs, verdict)
        mis_covering(cup, outputs, verdict)
    return verdict


def check_t_dynamic(history: GraphHistory, outputs: Mapping[int, Any], r: int, T: int, problem: str) -> Verdict:
    if r < 0:
        raise ValueError("round must be non-negative")
    return check_window(window_at(history, r, T), outputs, problem)


def t_dynamic_verdicts(trace: RoundTrace, T: int, problem: str, from_round: int = 0) -> list[Verdict]:
    """One T-dynamic verdict per round ``>= from_round``, sharing a single sliding window."""
    ws = WindowState(T)
    out = []
    for r in range(1, trace.rounds + 1):
        ws.advance(trace.history[r])
        if r >= from_round:
            out.append(check_window(ws, trace.outputs[r], problem))
    return out


# -- locally static -----------------------------------------------------------


def static_intervals(history: GraphHistory, alpha: int, nodes: Iterable[int] | None = None) -> list[StaticInterval]:
    """Maximal intervals (per node) during which the node's alpha-ball does not change."""
    last = len(history) - 1
    if nodes is None:
        nodes = sorted(history[last].active) if last >= 1 else []
    result = []
    for v in nodes:
        start = None
        prev = None
        for r in range(1, last + 1):
            snap = history[r]
            if v not in snap.active:
                continue
            b = ball(snap, v, alpha)
            if prev is not None and same_ball(prev, b):
                prev = b
                continue
            if start is not None:
                result.append(StaticInterval(v, alpha, start, r - 1))
            start, prev = r, b
        if start is not None:
            result.append(StaticInterval(v, alpha, start, last))
    return result


def check_locally_static(trace: RoundTrace, interval: StaticInterval, T1: int, T2: int) -> Verdict:
    lo = interval.start + T1 + T2
    verdict = Verdict(
        "locally_static",
        interval.end,
        vacuous=lo > interval.end,
        subject=[interval.node, interval.start, interval.end],
    )
    if verdict.vacuous:
        return verdict
    v = interval.node
    first = trace.outputs[lo].get(v)
    if first is None:
        verdict.fail(v, f"no output in round {lo}")
    for r in range(lo + 1, interval.end + 1):
        cur = trace.outputs[r].get(v)
        if cur != first:
            verdict.fail(v, f"output changed from {first!r} to {cur!r} in round {r}")
            break
    return verdict


# -- run-time monitors ----------------------------------------------------------


class InvariantViolation(AssertionError):
    pass


class PartialSolutionMonitor:
    """Checks at every round end that the outputs form a partial solution of G_r."""

    def __init__(self, problem: str, raise_on_fail: bool = True, salg: bool = False) -> None:
        self.problem = problem
        self.raise_on_fail = raise_on_fail
        self.salg = salg
        self.failures: list[Verdict] = []
        self.rounds = 0

    def __call__(self, r, snap, nodes, outs) -> None:
        if self.salg:
            outs = {v: node.salg_output for v, node in nodes.items()}
        verdict = check_partial(snap, outs, self.problem)
        self.rounds += 1
        if not verdict.ok:
            self.failures.append(verdict)
            if self.raise_on_fail:
                raise InvariantViolation(f"round {r}: {verdict.violations[:5]}")


class DesireMonitor:
    """SMis desire-levels stay within [1/(5n), 1/2]."""

    def __init__(self, n: int, get=lambda node: node) -> None:
        self.lo = Fraction(1, 5 * n)
        self.hi = Fraction(1, 2)
        self.get = get
        self.checked = 0

    def __call__(self, r, snap, nodes, outs) -> None:
        for v, node in nodes.items():
            p = self.get(node).p
            self.checked += 1
            if not self.lo <= p <= self.hi:
                raise InvariantViolation(f"round {r}: node {v} desire-level {p} out of bounds")


def _instances(nodes: Mapping[int, Any], r: int, wake: Mapping[int, int]) -> dict[int, dict[int, Any]]:
    """Map instance start round -> {node: dynamic instance} for plain or Concat nodes."""
    groups: dict[int, dict[int, Any]] = {}
    for v, node in nodes.items():
        queue = getattr(node, "instances", None)
        if queue is None:
            groups.setdefault(wake[v], {})[v] = node
            continue
        k = len(queue)
        for i, inst in enumerate(queue):
            groups.setdefault(r - (k - 1 - i), {})[v] = inst
    return groups


class DynamicInstanceMonitor:
    """Per-round checks on every dynamic-algorithm instance.

    * packing: no edge of the instance's running intersection graph joins two
      equal colors / two MIS nodes, unless both values were part of the input;
    * palette (coloring): ``|P_v| >= |U(v)| + 1`` for every uncolored node;
    * monotonicity: a decided value never changes.
    """

    def __init__(self, problem: str, raise_on_fail: bool = True) -> None:
        self.problem = problem
        self.raise_on_fail = raise_on_fail
        self.wake: dict[int, int] = {}
        self.running: dict[int, frozenset] = {}
        self.previous: dict[tuple[int, int], Any] = {}
        self.failures: list[str] = []
        self.checks = {"packing": 0, "palette": 0, "monotone": 0}

    def _fail(self, msg: str) -> None:
        self.failures.append(msg)
        if self.raise_on_fail:
            raise InvariantViolation(msg)

    def __call__(self, r, snap, nodes, outs) -> None:
        for v in nodes:
            self.wake.setdefault(v, r)
        groups = _instances(nodes, r, self.wake)
        running = {}
        for s in groups:
            base = self.running.get(s)
            running[s] = snap.edges if base is None else base & snap.edges
        self.running = running
        previous = {}
        coloring = self.problem == COLORING
        for s, members in groups.items():
            for (u, v) in running[s]:
                a = members.get(u)
                b = members.get(v)
                if a is None or b is None:
                    continue
                self.checks["packing"] += 1
                x, y = a.output, b.output
                if x is None or x != y:
                    continue
                if not coloring and x != MIS:
                    continue
                if _input_value(a) == x and _input_value(b) == y:
                    continue
                self._fail(f"round {r}: instance from round {s} has {x!r} on both ends of {(u, v)}")
            for v, inst in members.items():
                out = inst.output
                key = (s, v)
                old = self.previous.get(key)
                if old is not None:
                    self.checks["monotone"] += 1
                    if out != old:
                        self._fail(f"round {r}: node {v} instance {s} changed {old!r} -> {out!r}")
                if out is not None:
                    previous[key] = out
                if coloring and out is None and inst.started:
                    self.checks["palette"] += 1
                    unc = sum(
                        1 for u in inst.intersection_neighbors if u in members and members[u].output is None
                    )
                    if len(inst.palette) < unc + 1:
                        self._fail(
                            f"round {r}: node {v} instance {s} palette {len(inst.palette)} < {unc} + 1"
                        )
        self.previous = previous


def _input_value(inst) -> Any:
    return getattr(inst, "input_phi", getattr(inst, "input_state", None))
