"""JSON Lines run traces.

The first line is ``{"meta": {...}}``. Every following line is one round in
the replay format ``{round, wake, add, del}`` (deltas against the previous
round) plus ``outputs``, a map from node id to output (null for undecided).
"""

from __future__ import annotations

import json
from pathlib import Path
from typing import Any, Iterable

from dynanet.adversaries import ReplayRecord, snapshot_deltas
from dynanet.engine import RoundTrace
from dynanet.graph_core import GraphHistory, GraphSnapshot, canon


def _dumps(obj: Any) -> str:
    return json.dumps(obj, separators=(",", ":"))


def trace_lines(trace: RoundTrace) -> list[str]:
    lines = [_dumps({"meta": trace.meta})]
    hist = trace.history
    for r in range(1, trace.rounds + 1):
        rec = snapshot_deltas(hist[r - 1], hist[r]).to_json()
        outs = trace.outputs[r]
        rec["outputs"] = {str(v): outs[v] for v in sorted(outs)}
        lines.append(_dumps(rec))
    return lines


def dumps_trace(trace: RoundTrace) -> str:
    return "\n".join(trace_lines(trace)) + "\n"


def write_trace(trace: RoundTrace, path: str | Path) -> None:
    Path(path).write_text(dumps_trace(trace))


def read_trace(path: str | Path) -> RoundTrace:
    with open(path) as fh:
        return parse_trace(fh)


def loads_trace(text: str) -> RoundTrace:
    return parse_trace(text.splitlines())


def parse_trace(lines: Iterable[str]) -> RoundTrace:
    meta: dict = {}
    history = GraphHistory()
    trace = RoundTrace(history)
    active: set[int] = set()
    edges: set = set()
    for line in lines:
        if not line.strip():
            continue
        obj = json.loads(line)
        if "meta" in obj:
            meta = obj["meta"]
            continue
        r = obj["round"]
        rec = ReplayRecord(r, obj.get("wake", []), obj.get("add", []), obj.get("del", []))
        active.update(rec.wake)
        for v in rec.wake:
            trace.wake_round[v] = r
        for u, v in rec.delete:
            edges.discard(canon(u, v))
        for u, v in rec.add:
            edges.add(canon(u, v))
        history.append(GraphSnapshot(r, frozenset(active), frozenset(edges)))
        trace.outputs.append({int(k): val for k, val in obj.get("outputs", {}).items()})
        trace.metrics.append({})
    trace.meta = meta
    return trace
