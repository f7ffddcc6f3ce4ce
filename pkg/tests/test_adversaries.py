import json

import pytest

from dynanet.adversaries import (
    ChurnAdversary,
    LocallyStaticAdversary,
    ReplayAdversary,
    ReplayRecord,
    StaticAdversary,
    WakeScheduleWrapper,
    complete_edges,
    gnp_edges,
    read_replay,
)
from dynanet.engine import EngineConfig, run
from dynanet.graph_core import GraphError, ball, same_ball
from dynanet.verifier import static_intervals


class Silent:
    def __init__(self, v):
        pass

    def send(self, rng):
        return None

    def receive(self, inputs):
        return None


def graphs(adversary, n, rounds, seed=0):
    trace = run(EngineConfig(n=n, seed=seed), adversary, Silent, rounds)
    return trace.history, trace.rounds


def test_static_triangle():
    h, R = graphs(StaticAdversary(3, complete_edges(3)), 3, 5)
    for r in range(1, R + 1):
        assert h[r].edges == {(0, 1), (1, 2), (0, 2)}
        assert h[r].active == {0, 1, 2}


def test_churn_without_flips_is_constant():
    cand = gnp_edges(40, 0.1, 2)
    h, R = graphs(ChurnAdversary(40, cand, 0.0, 0.0), 40, 20)
    assert all(h[r].edges == cand for r in range(1, R + 1))


def test_churn_flips_stay_in_candidates():
    cand = gnp_edges(40, 0.1, 2)
    h, R = graphs(ChurnAdversary(40, cand, 0.3, 0.3), 40, 20)
    assert all(h[r].edges <= cand for r in range(1, R + 1))
    assert len({h[r].edges for r in range(1, R + 1)}) > 1


def test_churn_start_empty():
    cand = gnp_edges(20, 0.2, 2)
    h, _ = graphs(ChurnAdversary(20, cand, 0.1, 0.1, start_full=False), 20, 2)
    assert h[1].edges == frozenset()


def test_churn_flip_rates():
    cand = complete_edges(60)
    h, _ = graphs(ChurnAdversary(60, cand, 0.2, 0.1), 60, 2, seed=4)
    dropped = len(h[1].edges - h[2].edges) / len(cand)
    assert 0.08 < dropped < 0.12


def test_wake_schedule_wrapper():
    adv = WakeScheduleWrapper(StaticAdversary(4, complete_edges(4)), {2: 3, 3: 5})
    h, _ = graphs(adv, 4, 6)
    assert h[1].active == {0, 1} and h[1].edges == {(0, 1)}
    assert h[3].active == {0, 1, 2}
    assert h[5].active == {0, 1, 2, 3} and len(h[5].edges) == 6


def test_replay_roundtrip_and_exhaustion(tmp_path):
    records = [
        ReplayRecord(1, [0, 1, 2], [[0, 1]], []),
        ReplayRecord(2, [3], [[2, 3], [1, 2]], [[0, 1]]),
    ]
    path = tmp_path / "t.jsonl"
    path.write_text("".join(json.dumps(r.to_json()) + "\n" for r in records))
    assert [r.to_json() for r in read_replay(path)] == [r.to_json() for r in records]
    h, R = graphs(ReplayAdversary(path), 4, 10)
    assert R == 2
    assert h[1].edges == {(0, 1)}
    assert h[2].active == {0, 1, 2, 3} and h[2].edges == {(1, 2), (2, 3)}


def test_replay_rejects_nonempty_round_zero():
    with pytest.raises(GraphError):
        ReplayAdversary([ReplayRecord(0, [1], [], [])])


def test_locally_static_freezes_ball():
    cand = gnp_edges(50, 0.08, 7)
    adv = LocallyStaticAdversary(ChurnAdversary(50, cand, 0.05, 0.05), node=0, alpha=2, start=10, end=60)
    h, _ = graphs(adv, 50, 70, seed=3)
    anchor = ball(h[10], 0, 2)
    for r in range(10, 61):
        assert same_ball(ball(h[r], 0, 2), anchor)
    # the brute-force interval finder agrees: one interval covers [10, 60]
    ivs = [iv for iv in static_intervals(h, 2, [0]) if iv.start <= 10 and iv.end >= 60]
    assert len(ivs) == 1


def test_locally_static_leaves_rest_to_inner():
    cand = gnp_edges(50, 0.08, 7)
    adv = LocallyStaticAdversary(ChurnAdversary(50, cand, 0.05, 0.05), node=0, alpha=2, start=10, end=60)
    h, _ = graphs(adv, 50, 20, seed=3)
    assert len({h[r].edges for r in range(10, 21)}) > 1


def test_locally_static_bad_interval():
    with pytest.raises(ValueError):
        LocallyStaticAdversary(StaticAdversary(2, []), 0, 2, 5, 4)
