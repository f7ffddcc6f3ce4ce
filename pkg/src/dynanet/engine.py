"""Synchronous round loop: adversary change, local-broadcast exchange, outputs."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Any, Callable, Iterable, Protocol, Sequence

from dynanet.graph_core import GraphError, GraphHistory, GraphSnapshot
from dynanet.rng import SeedPlan, Stream

Payload = Any
Output = Any


class RoundInputs:
    __slots__ = ("received", "current_degree", "rng")

    def __init__(self, received: list[tuple[int, Payload]], current_degree: int, rng: Stream) -> None:
        self.received = received
        self.current_degree = current_degree
        self.rng = rng


class NodeAlgorithm(Protocol):
    """Per-node state machine.

    ``send`` is called first in every round the node is awake (including its
    wake-up round) and returns the broadcast payload, or None to stay silent.
    It sees only the node's own state and fresh randomness. ``receive`` then
    gets the messages delivered over the current graph and returns the node's
    output for the round. Nodes are never told the global round number.
    """

    def send(self, rng: Stream) -> Payload | None: ...

    def receive(self, inputs: RoundInputs) -> Output: ...


class Codec(Protocol):
    def encode(self, payload: Payload) -> bytes: ...

    def decode(self, data: bytes) -> Payload: ...


AlgorithmFactory = Callable[[int], NodeAlgorithm]
Monitor = Callable[[int, GraphSnapshot, dict, dict], None]


class OutputsView:
    """Read-only access to past outputs, cut off at a visibility horizon."""

    def __init__(self, outputs: list[dict], horizon: int) -> None:
        self._outputs = outputs
        self.horizon = horizon

    def __len__(self) -> int:
        return max(0, min(len(self._outputs), self.horizon + 1))

    def __getitem__(self, r: int) -> dict:
        if r < 0 or r > self.horizon:
            raise IndexError(f"outputs of round {r} are not visible (horizon {self.horizon})")
        return dict(self._outputs[r])


@dataclass
class AdversaryView:
    """Everything an adversary may look at when choosing the graph of ``round``."""

    round: int
    history: GraphHistory
    outputs: OutputsView
    rng: Stream


class Adversary(Protocol):
    def next_graph(self, view: AdversaryView) -> GraphSnapshot | None: ...


@dataclass
class EngineConfig:
    n: int
    seed: int = 0
    rho: int = 2
    keep_history: int | None = None
    wire: bool = False
    node_salt: int = 0


@dataclass
class RoundTrace:
    history: GraphHistory
    wake_round: dict[int, int] = field(default_factory=dict)
    outputs: list[dict[int, Output]] = field(default_factory=lambda: [{}])
    metrics: list[dict[str, int]] = field(default_factory=lambda: [{}])
    meta: dict[str, Any] = field(default_factory=dict)

    @property
    def rounds(self) -> int:
        return len(self.outputs) - 1


def deliver(snapshot: GraphSnapshot, payloads: dict[int, Payload]) -> dict[int, list[tuple[int, Payload]]]:
    for u in payloads:
        if u not in snapshot.active:
            raise GraphError(f"sender {u} is not active in round {snapshot.round}")
    adj = snapshot.adjacency
    inbox: dict[int, list[tuple[int, Payload]]] = {}
    for v in sorted(snapshot.active):
        inbox[v] = [(u, payloads[u]) for u in sorted(adj[v]) if u in payloads]
    return inbox


def run(
    config: EngineConfig,
    adversary: Adversary,
    algorithm_factory: AlgorithmFactory,
    rounds: int,
    monitors: Sequence[Monitor] = (),
    codec: Codec | None = None,
) -> RoundTrace:
    if rounds < 1:
        raise ValueError("rounds must be >= 1")
    if config.wire and codec is None:
        raise ValueError("wire mode needs a codec")
    plan = SeedPlan(config.seed, config.node_salt)
    history = GraphHistory(keep=config.keep_history)
    trace = RoundTrace(history)
    nodes: dict[int, NodeAlgorithm] = {}
    order: list[int] = []

    for r in range(1, rounds + 1):
        view = AdversaryView(
            round=r,
            history=history,
            outputs=OutputsView(trace.outputs, r - 1 - config.rho),
            rng=plan.adversary_stream(r),
        )
        snap = adversary.next_graph(view)
        if snap is None:
            break
        if snap.round != r:
            raise GraphError(f"adversary produced round {snap.round} while round {r} was due")
        if any(v < 0 or v >= config.n for v in snap.active):
            raise GraphError(f"node id out of range [0, {config.n}) in round {r}")
        history.append(snap)

        woken = sorted(snap.active.difference(nodes))
        for v in woken:
            nodes[v] = algorithm_factory(v)
            trace.wake_round[v] = r
        if woken:
            order = sorted(nodes)

        streams: dict[int, Stream] = {}
        payloads: dict[int, Payload] = {}
        for v in order:
            s = plan.node_stream(v, r)
            streams[v] = s
            p = nodes[v].send(s)
            if p is not None:
                payloads[v] = p
        if config.wire:
            payloads = {v: codec.decode(codec.encode(p)) for v, p in payloads.items()}

        inbox = deliver(snap, payloads)
        outs: dict[int, Output] = {}
        for v in order:
            outs[v] = nodes[v].receive(RoundInputs(inbox[v], snap.degree(v), streams[v]))
        trace.outputs.append(outs)
        trace.metrics.append({"messages": sum(len(m) for m in inbox.values()), "awake": len(order)})
        for m in monitors:
            m(r, snap, nodes, outs)
    return trace
