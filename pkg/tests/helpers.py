"""Shared builders and naive oracles for the test-suite."""

import random

from hypothesis import strategies as st

from dynanet.graph_core import GraphHistory, GraphSnapshot


def history_from(rounds):
    """``rounds`` is a list of (active, edges) for rounds 1, 2, ..."""
    h = GraphHistory()
    for r, (active, edges) in enumerate(rounds, start=1):
        h.append(GraphSnapshot.build(r, active, edges))
    return h


def naive_window(history, r, T):
    """Direct set algebra over stored snapshots: (nodes, intersection, union)."""
    r0 = max(0, r - T + 1)
    nodes = history[r0].active
    snaps = [history[k] for k in range(r0, r + 1)]
    cap = set(snaps[0].edges)
    cup = set()
    for s in snaps:
        cap &= s.edges
        cup |= s.edges
    cup = {e for e in cup if e[0] in nodes and e[1] in nodes}
    return nodes, frozenset(cap), frozenset(cup)


def random_history(rng: random.Random, n: int, rounds: int, p_edge: float = 0.3, p_wake: float = 0.3):
    active = set()
    out = []
    for _ in range(rounds):
        active |= {v for v in range(n) if rng.random() < p_wake}
        nodes = sorted(active)
        edges = [(u, v) for i, u in enumerate(nodes) for v in nodes[i + 1 :] if rng.random() < p_edge]
        out.append((set(active), edges))
    return history_from(out)


@st.composite
def histories(draw, max_n=12, max_rounds=12):
    n = draw(st.integers(1, max_n))
    rounds = draw(st.integers(1, max_rounds))
    active = set()
    out = []
    for _ in range(rounds):
        active |= set(draw(st.sets(st.integers(0, n - 1))))
        nodes = sorted(active)
        pairs = [(u, v) for i, u in enumerate(nodes) for v in nodes[i + 1 :]]
        edges = [e for e in pairs if draw(st.booleans())]
        out.append((set(active), edges))
    return history_from(out)
