from dynanet.adversaries import ChurnAdversary, ReplayAdversary, gnp_edges, read_replay
from dynanet.coloring import SColor
from dynanet.engine import EngineConfig, run
from dynanet.tracefile import dumps_trace, loads_trace, read_trace, write_trace


def sample_trace():
    n = 20
    trace = run(
        EngineConfig(n=n, seed=6),
        ChurnAdversary(n, gnp_edges(n, 0.2, 1), 0.1, 0.1),
        lambda v: SColor(),
        25,
    )
    trace.meta = {"algorithm": "scolor_only", "n": n}
    return trace


def test_roundtrip(tmp_path):
    trace = sample_trace()
    path = tmp_path / "t.jsonl"
    write_trace(trace, path)
    back = read_trace(path)
    assert back.meta == trace.meta
    assert back.outputs == trace.outputs
    assert all(back.history[r] == trace.history[r] for r in range(26))
    assert dumps_trace(back) == path.read_text()
    assert dumps_trace(loads_trace(path.read_text())) == path.read_text()


def test_trace_is_a_replay_file(tmp_path):
    trace = sample_trace()
    path = tmp_path / "t.jsonl"
    write_trace(trace, path)
    assert len(list(read_replay(path))) == 25
    again = run(EngineConfig(n=20, seed=6), ReplayAdversary(path), lambda v: SColor(), 100)
    assert again.rounds == 25
    assert again.outputs == trace.outputs
