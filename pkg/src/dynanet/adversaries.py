"""Graph-sequence generators.

Every adversary receives an :class:`~dynanet.engine.AdversaryView` holding the
graph history up to the previous round, outputs up to its obliviousness
horizon, and a random stream that is disjoint from all node streams.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Iterator

import networkx as nx

from dynanet.engine import AdversaryView
from dynanet.graph_core import Edge, GraphError, GraphSnapshot, ball, canon

KINDS = ("static", "churn", "replay", "locally_static", "wake_schedule_wrapper")


def gnp_edges(n: int, p: float, seed: int) -> frozenset[Edge]:
    g = nx.gnp_random_graph(n, p, seed=seed)
    return frozenset(canon(u, v) for u, v in g.edges())


def complete_edges(n: int) -> frozenset[Edge]:
    return frozenset((u, v) for u in range(n) for v in range(u + 1, n))


class StaticAdversary:
    """Repeats one graph; every node wakes in round 1."""

    def __init__(self, n: int, edges: Iterable[tuple[int, int]]) -> None:
        self.nodes = frozenset(range(n))
        self.edges = frozenset(canon(u, v) for u, v in edges)

    def next_graph(self, view: AdversaryView) -> GraphSnapshot:
        return GraphSnapshot(view.round, self.nodes, self.edges)


class ChurnAdversary:
    """Random edge flips over a fixed candidate edge set.

    Round 1 wakes every node with all candidate edges present (``start_full``)
    or none. Afterwards each absent candidate appears with probability
    ``p_add`` and each present one disappears with ``p_del``. Draws come only
    from the adversary stream, so the sequence never depends on node coins.
    """

    def __init__(
        self,
        n: int,
        candidates: Iterable[tuple[int, int]],
        p_add: float,
        p_del: float,
        start_full: bool = True,
    ) -> None:
        self.nodes = frozenset(range(n))
        self.candidates = sorted(canon(u, v) for u, v in candidates)
        self.p_add = p_add
        self.p_del = p_del
        self.start_full = start_full
        self.present: set[Edge] = set()

    def next_graph(self, view: AdversaryView) -> GraphSnapshot:
        if view.round == 1:
            self.present = set(self.candidates) if self.start_full else set()
        else:
            rng = view.rng
            present = self.present
            for e in self.candidates:
                if e in present:
                    if self.p_del and rng.random() < self.p_del:
                        present.discard(e)
                elif self.p_add and rng.random() < self.p_add:
                    present.add(e)
        return GraphSnapshot(view.round, self.nodes, frozenset(self.present))


@dataclass
class ReplayRecord:
    round: int
    wake: list[int]
    add: list[list[int]]
    delete: list[list[int]]

    def to_json(self) -> dict:
        return {"round": self.round, "wake": self.wake, "add": self.add, "del": self.delete}


def read_replay(path: str | Path) -> Iterator[ReplayRecord]:
    with open(path) as fh:
        for line in fh:
            line = line.strip()
            if not line:
                continue
            obj = json.loads(line)
            if "round" not in obj:
                continue
            yield ReplayRecord(obj["round"], obj.get("wake", []), obj.get("add", []), obj.get("del", []))


def snapshot_deltas(prev: GraphSnapshot, cur: GraphSnapshot) -> ReplayRecord:
    return ReplayRecord(
        cur.round,
        sorted(cur.active - prev.active),
        [list(e) for e in sorted(cur.edges - prev.edges)],
        [list(e) for e in sorted(prev.edges - cur.edges)],
    )


class ReplayAdversary:
    """Plays back a delta-encoded trace; an exhausted trace ends the run."""

    def __init__(self, records: Iterable[ReplayRecord] | str | Path) -> None:
        if isinstance(records, (str, Path)):
            records = read_replay(records)
        self.records = {}
        for rec in records:
            if rec.round == 0:
                if rec.wake or rec.add:
                    raise GraphError("round 0 of a replay must be empty")
                continue
            self.records[rec.round] = rec
        self.active: set[int] = set()
        self.edges: set[Edge] = set()

    def next_graph(self, view: AdversaryView) -> GraphSnapshot | None:
        rec = self.records.get(view.round)
        if rec is None:
            return None
        self.active.update(rec.wake)
        for u, v in rec.delete:
            self.edges.discard(canon(u, v))
        for u, v in rec.add:
            self.edges.add(canon(u, v))
        return GraphSnapshot(view.round, frozenset(self.active), frozenset(self.edges))


class LocallyStaticAdversary:
    """Freezes the ``alpha``-ball of one node over ``[start, end]`` on top of an inner adversary.

    The ball is taken in the graph of round ``start``. During the interval all
    edges inside the ball are pinned to that graph and interior nodes (closer
    than ``alpha``) may not gain edges to nodes outside it, so the ball's node
    and edge sets cannot change. Edges leaving the ball through its boundary
    layer are left to the inner adversary.
    """

    def __init__(self, inner, node: int, alpha: int, start: int, end: int) -> None:
        if end < start:
            raise ValueError("interval end precedes its start")
        self.inner = inner
        self.node = node
        self.alpha = alpha
        self.start = start
        self.end = end
        self.anchor: GraphSnapshot | None = None
        self.interior: frozenset[int] = frozenset()

    def next_graph(self, view: AdversaryView) -> GraphSnapshot | None:
        snap = self.inner.next_graph(view)
        if snap is None or not self.start <= view.round <= self.end:
            return snap
        if view.round == self.start:
            self.anchor = ball(snap, self.node, self.alpha)
            dist = _distances(snap, self.node, self.alpha)
            self.interior = frozenset(v for v, d in dist.items() if d < self.alpha)
            return snap
        ball_nodes = self.anchor.active
        interior = self.interior
        edges = {
            e
            for e in snap.edges
            if not (e[0] in ball_nodes and e[1] in ball_nodes)
            and not (e[0] in interior or e[1] in interior)
        }
        edges |= self.anchor.edges
        return GraphSnapshot(view.round, snap.active, frozenset(edges))


def _distances(graph: GraphSnapshot, v: int, limit: int) -> dict[int, int]:
    dist = {v: 0}
    frontier = [v]
    adj = graph.adjacency
    for d in range(1, limit + 1):
        nxt = []
        for u in frontier:
            for w in adj[u]:
                if w not in dist:
                    dist[w] = d
                    nxt.append(w)
        frontier = nxt
    return dist


class WakeScheduleWrapper:
    """Keeps each node asleep until its scheduled round (nodes absent from the schedule wake at 1)."""

    def __init__(self, inner, schedule: dict[int, int]) -> None:
        self.inner = inner
        self.schedule = dict(schedule)

    def next_graph(self, view: AdversaryView) -> GraphSnapshot | None:
        snap = self.inner.next_graph(view)
        if snap is None:
            return None
        r = view.round
        awake = frozenset(v for v in snap.active if self.schedule.get(v, 1) <= r)
        edges = frozenset(e for e in snap.edges if e[0] in awake and e[1] in awake)
        return GraphSnapshot(r, awake, edges)
