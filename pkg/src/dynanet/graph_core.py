"""Per-round graph snapshots and sliding-window intersection/union graphs."""

from __future__ import annotations

import hashlib
from collections import deque
from dataclasses import dataclass, field
from functools import cached_property
from typing import Iterable, Iterator

Edge = tuple[int, int]


class GraphError(ValueError):
    """Malformed snapshot or history."""


class SequencingError(GraphError):
    """A window was advanced with a non-consecutive round."""


def canon(u: int, v: int) -> Edge:
    if u == v:
        raise GraphError(f"self-loop on node {u}")
    return (u, v) if u < v else (v, u)


@dataclass(frozen=True)
class GraphSnapshot:
    round: int
    active: frozenset[int]
    edges: frozenset[Edge]

    def __post_init__(self) -> None:
        for u, v in self.edges:
            if u >= v:
                raise GraphError(f"edge {(u, v)} is not canonical (min, max)")
            if u not in self.active or v not in self.active:
                raise GraphError(f"edge {(u, v)} has an inactive endpoint in round {self.round}")

    @classmethod
    def build(cls, round: int, active: Iterable[int], edges: Iterable[tuple[int, int]]) -> "GraphSnapshot":
        return cls(round, frozenset(active), frozenset(canon(u, v) for u, v in edges))

    @cached_property
    def adjacency(self) -> dict[int, frozenset[int]]:
        adj: dict[int, set[int]] = {v: set() for v in self.active}
        for u, v in self.edges:
            adj[u].add(v)
            adj[v].add(u)
        return {v: frozenset(nb) for v, nb in adj.items()}

    def neighbors(self, v: int) -> frozenset[int]:
        return self.adjacency.get(v, frozenset())

    def degree(self, v: int) -> int:
        return len(self.adjacency.get(v, ()))

    def induced(self, nodes: Iterable[int]) -> "GraphSnapshot":
        keep = frozenset(nodes) & self.active
        return GraphSnapshot(
            self.round, keep, frozenset(e for e in self.edges if e[0] in keep and e[1] in keep)
        )

    def digest(self) -> bytes:
        h = hashlib.sha256()
        h.update(f"{self.round}|".encode())
        h.update(",".join(map(str, sorted(self.active))).encode())
        h.update(b"|")
        h.update(";".join(f"{u}-{v}" for u, v in sorted(self.edges)).encode())
        return h.digest()


def empty_snapshot(round: int = 0) -> GraphSnapshot:
    return GraphSnapshot(round, frozenset(), frozenset())


class GraphHistory:
    """Snapshots indexed by round, starting from the empty round-0 graph.

    With ``keep`` set, only the most recent ``keep`` snapshots are retained and
    a running digest stands in for the rest.
    """

    def __init__(self, keep: int | None = None) -> None:
        self.keep = keep
        self._snaps: deque[GraphSnapshot] = deque(maxlen=keep)
        self._first = 0
        self._digest = hashlib.sha256()
        self.append(empty_snapshot(0))

    def append(self, snap: GraphSnapshot) -> None:
        if snap.round != len(self):
            raise SequencingError(f"expected round {len(self)}, got {snap.round}")
        if self._snaps:
            prev = self._snaps[-1]
            if not prev.active <= snap.active:
                lost = sorted(prev.active - snap.active)
                raise GraphError(f"active set shrank in round {snap.round}: lost {lost}")
        elif snap.active:
            raise GraphError("round 0 must have no active nodes")
        if self.keep is not None and len(self._snaps) == self.keep:
            self._first += 1
        self._snaps.append(snap)
        self._digest.update(snap.digest())

    def __len__(self) -> int:
        return self._first + len(self._snaps)

    def __getitem__(self, r: int) -> GraphSnapshot:
        if r < 0:
            r += len(self)
        if r < self._first:
            raise IndexError(f"round {r} was evicted (keeping {self.keep})")
        return self._snaps[r - self._first]

    def __iter__(self) -> Iterator[GraphSnapshot]:
        return iter(self._snaps)

    @property
    def last(self) -> GraphSnapshot:
        return self._snaps[-1]

    @property
    def first_round(self) -> int:
        return self._first

    def digest(self) -> str:
        return self._digest.hexdigest()

    @classmethod
    def from_snapshots(cls, snaps: Iterable[GraphSnapshot]) -> "GraphHistory":
        h = cls()
        for s in snaps:
            if s.round == 0:
                if s.active or s.edges:
                    raise GraphError("round 0 must be empty")
                continue
            h.append(s)
        return h


@dataclass
class WindowState:
    """Per-edge presence counters over the last ``window`` rounds.

    The intersection graph holds edges present in every round of the window;
    the union graph holds edges present at least once. Both live on the nodes
    that were already active when the window opened.
    """

    window: int
    current_round: int = 0
    edge_count: dict[Edge, int] = field(default_factory=dict)
    _edges: deque = field(default_factory=deque, repr=False)
    _active: deque = field(default_factory=deque, repr=False)

    def __post_init__(self) -> None:
        if self.window < 1:
            raise ValueError("window must be positive")
        if not self._edges:
            # round 0: V_0 = E_0 = empty
            self._edges.append(frozenset())
            self._active.append(frozenset())

    @property
    def node_floor(self) -> int:
        return max(0, self.current_round - self.window + 1)

    @property
    def span(self) -> int:
        return self.current_round - self.node_floor + 1

    def advance(self, incoming: GraphSnapshot) -> "WindowState":
        if incoming.round != self.current_round + 1:
            raise SequencingError(
                f"window at round {self.current_round} cannot take round {incoming.round}"
            )
        counts = self.edge_count
        for e in incoming.edges:
            counts[e] = counts.get(e, 0) + 1
        self._edges.append(incoming.edges)
        self._active.append(incoming.active)
        self.current_round = incoming.round
        if len(self._edges) > self.window:
            for e in self._edges.popleft():
                c = counts[e] - 1
                if c:
                    counts[e] = c
                else:
                    del counts[e]
            self._active.popleft()
        return self

    @property
    def nodes(self) -> frozenset[int]:
        return self._active[0]

    def intersection_edges(self) -> frozenset[Edge]:
        span = self.span
        return frozenset(e for e, c in self.edge_count.items() if c == span)

    def union_edges(self) -> frozenset[Edge]:
        nodes = self.nodes
        return frozenset(e for e in self.edge_count if e[0] in nodes and e[1] in nodes)

    def intersection_graph(self) -> GraphSnapshot:
        return GraphSnapshot(self.current_round, self.nodes, self.intersection_edges())

    def union_graph(self) -> GraphSnapshot:
        return GraphSnapshot(self.current_round, self.nodes, self.union_edges())


def advance(window_state: WindowState, incoming: GraphSnapshot, history: GraphHistory | None = None) -> WindowState:
    """Functional spelling of :meth:`WindowState.advance`; ``history`` is only sanity-checked."""
    if history is not None and len(history) <= incoming.round:
        raise SequencingError(f"history does not yet contain round {incoming.round}")
    return window_state.advance(incoming)


def intersection_graph(window_state: WindowState) -> GraphSnapshot:
    return window_state.intersection_graph()


def union_graph(window_state: WindowState) -> GraphSnapshot:
    return window_state.union_graph()


def window_at(history: GraphHistory, r: int, window: int) -> WindowState:
    """Window state for round ``r`` built from the stored snapshots of its window."""
    start = max(0, r - window + 1)
    ws = WindowState(window)
    if start > 1:
        # pretend the window just processed round start-1; that entry is evicted on the next advance
        prev = history[start - 1]
        ws.current_round = start - 1
        ws._edges = deque([prev.edges])
        ws._active = deque([prev.active])
        ws.edge_count = dict.fromkeys(prev.edges, 1)
    for k in range(max(start, 1), r + 1):
        ws.advance(history[k])
    return ws


def ball(graph: GraphSnapshot, v: int, alpha: int) -> GraphSnapshot:
    """Induced subgraph on all nodes within ``alpha`` hops of ``v``."""
    if v not in graph.active:
        raise GraphError(f"node {v} is not active in round {graph.round}")
    if alpha < 0:
        raise ValueError("alpha must be non-negative")
    adj = graph.adjacency
    seen = {v}
    frontier = [v]
    for _ in range(alpha):
        nxt = []
        for u in frontier:
            for w in adj[u]:
                if w not in seen:
                    seen.add(w)
                    nxt.append(w)
        if not nxt:
            break
        frontier = nxt
    return graph.induced(seen)


def same_ball(a: GraphSnapshot, b: GraphSnapshot) -> bool:
    return a.active == b.active and a.edges == b.edges
