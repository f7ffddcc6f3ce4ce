import csv
import json

import pytest

from dynanet.cli import main, parse_seeds, summarize


def write_config(tmp_path, **over):
    cfg = {
        "algorithm": "concat_coloring",
        "n": 40,
        "rounds": 60,
        "T1": 8,
        "T2": 8,
        "seeds": [1, 2, 3],
        "out_dir": str(tmp_path / "out"),
        "adversary": {"kind": "churn", "p_add": 0.02, "p_del": 0.02, "base": {"kind": "gnp", "p": 0.15}},
    }
    cfg.update(over)
    path = tmp_path / "cfg.json"
    path.write_text(json.dumps(cfg))
    return path


def read_rows(path):
    with open(path, newline="") as fh:
        return list(csv.DictReader(fh))


def test_parse_seeds():
    assert parse_seeds("1..3,7") == [1, 2, 3, 7]
    assert parse_seeds("5") == [5]


def test_run_writes_traces_and_metrics(tmp_path):
    cfg = write_config(tmp_path)
    assert main(["run", "--config", str(cfg), "--seeds", "1..3"]) == 0
    out = tmp_path / "out"
    assert sorted(p.name for p in out.glob("trace_seed*.jsonl")) == [f"trace_seed{s}.jsonl" for s in (1, 2, 3)]
    rows = read_rows(out / "metrics.csv")
    assert len(rows) == 3 * 60
    assert list(rows[0]) == ["seed", "round", "awake", "undecided", "conflicts_cap", "covering_violations", "h_edges", "palette_min"]
    first = (out / "trace_seed2.jsonl").read_text()
    assert main(["run", "--config", str(cfg), "--seed", "2", "--out-dir", str(tmp_path / "again")]) == 0
    assert (tmp_path / "again" / "trace_seed2.jsonl").read_text() == first


def test_parallel_matches_serial(tmp_path, monkeypatch):
    cfg = write_config(tmp_path)
    monkeypatch.setenv("DYNANET_THREADS", "1")
    main(["run", "--config", str(cfg), "--out-dir", str(tmp_path / "serial")])
    monkeypatch.setenv("DYNANET_THREADS", "3")
    main(["run", "--config", str(cfg), "--out-dir", str(tmp_path / "par")])
    for name in ["metrics.csv", "trace_seed1.jsonl", "trace_seed3.jsonl"]:
        assert (tmp_path / "serial" / name).read_text() == (tmp_path / "par" / name).read_text()


@pytest.mark.parametrize("algorithm", ["basic_coloring", "scolor_only", "smis_only", "dmis_only"])
def test_single_node_decided_round_one(tmp_path, algorithm):
    cfg = write_config(tmp_path, algorithm=algorithm, n=1, rounds=5, seeds=[0], adversary={"kind": "static", "base": {"kind": "complete"}})
    assert main(["run", "--config", str(cfg)]) == 0
    rows = read_rows(tmp_path / "out" / "metrics.csv")
    assert [r["undecided"] for r in rows] == ["0"] * 5
    trace = (tmp_path / "out" / "trace_seed0.jsonl").read_text().splitlines()
    expected = "M" if "mis" in algorithm else 1
    assert json.loads(trace[1])["outputs"] == {"0": expected}


def test_verify_passing_trace(tmp_path, capsys):
    cfg = write_config(tmp_path)
    main(["run", "--config", str(cfg), "--seed", "1"])
    capsys.readouterr()
    code = main(["verify", str(tmp_path / "out" / "trace_seed1.jsonl")])
    report = json.loads(capsys.readouterr().out)
    assert code == 0
    assert {e["property"] for e in report} == {"t_dynamic"}
    assert [e["round"] for e in report] == list(range(16, 61))


def test_verify_partial_on_scolor(tmp_path, capsys):
    cfg = write_config(tmp_path, algorithm="scolor_only")
    main(["run", "--config", str(cfg), "--seed", "1"])
    capsys.readouterr()
    code = main(["verify", str(tmp_path / "out" / "trace_seed1.jsonl"), "--properties", "partial"])
    report = json.loads(capsys.readouterr().out)
    assert code == 0 and len(report) == 60


def test_verify_catches_injected_fault(tmp_path, capsys):
    cfg = write_config(tmp_path, adversary={"kind": "static", "base": {"kind": "edges", "edges": [[0, 1], [1, 2]]}}, n=3)
    main(["run", "--config", str(cfg), "--seed", "1"])
    path = tmp_path / "out" / "trace_seed1.jsonl"
    lines = path.read_text().splitlines()
    last = json.loads(lines[-1])
    last["outputs"]["0"] = last["outputs"]["1"]
    lines[-1] = json.dumps(last)
    path.write_text("\n".join(lines) + "\n")
    capsys.readouterr()
    code = main(["verify", str(path)])
    report = json.loads(capsys.readouterr().out)
    assert code != 0
    bad = [e for e in report if not e["ok"]]
    assert len(bad) == 1 and bad[0]["round"] == 60
    assert bad[0]["violations"][0][0] == [0, 1]
    assert "both endpoints colored" in bad[0]["violations"][0][1]
    assert main(["verify", str(path), "--fail-budget", "1"]) == 0


def test_replay_then_verify_matches_inline(tmp_path):
    cfg = write_config(tmp_path, algorithm="concat_mis", seeds=[4, 5])
    assert main(["run", "--config", str(cfg), "--properties", "t_dynamic,locally_static", "--fail-budget", "2"]) == 0
    out = tmp_path / "out"
    traces = [str(out / "trace_seed4.jsonl"), str(out / "trace_seed5.jsonl")]
    main(["replay", *traces, "--out-dir", str(tmp_path / "rep"), "--properties", "t_dynamic,locally_static", "--fail-budget", "2"])
    for s in (4, 5):
        assert (tmp_path / "rep" / f"replay_trace_seed{s}.jsonl").read_bytes() == (out / f"trace_seed{s}.jsonl").read_bytes()
    assert (tmp_path / "rep" / "verify.json").read_bytes() == (out / "verify.json").read_bytes()
    main(["verify", *traces, "--properties", "t_dynamic,locally_static", "--out", str(tmp_path / "v.json"), "--fail-budget", "2"])
    assert (tmp_path / "v.json").read_bytes() == (out / "verify.json").read_bytes()


def test_replay_with_new_node_seed_keeps_graphs(tmp_path):
    cfg = write_config(tmp_path, seeds=[1])
    main(["run", "--config", str(cfg)])
    main(["replay", str(tmp_path / "out" / "trace_seed1.jsonl"), "--seed", "77", "--out-dir", str(tmp_path / "rep")])
    a = (tmp_path / "out" / "trace_seed1.jsonl").read_text().splitlines()[1:]
    b = (tmp_path / "rep" / "replay_trace_seed1.jsonl").read_text().splitlines()[1:]
    strip = lambda line: {k: v for k, v in json.loads(line).items() if k != "outputs"}
    assert [strip(x) for x in a] == [strip(x) for x in b]
    assert a != b


def test_unknown_property(tmp_path):
    cfg = write_config(tmp_path)
    assert main(["run", "--config", str(cfg), "--properties", "fast"]) == 2


def test_stats_empty_csv(tmp_path, capsys):
    path = tmp_path / "m.csv"
    path.write_text("")
    assert main(["stats", str(path)]) == 0
    assert json.loads(capsys.readouterr().out) == {}


def test_stats_hand_fixture(tmp_path, capsys):
    path = tmp_path / "m.csv"
    path.write_text(
        "seed,round,awake,undecided,conflicts_cap,covering_violations,h_edges,palette_min\n"
        "0,1,10,5,0,0,100,\n"
        "0,2,10,0,0,0,60,\n"
        "0,3,10,0,0,0,30,\n"
    )
    assert main(["stats", str(path)]) == 0
    summary = json.loads(capsys.readouterr().out)
    # only round 1 has a round + 2 partner: 30 / 100
    assert summary["decay"] == {"samples": 1, "mean_ratio": 0.3}
    assert summary["convergence_round"] == {"p50": 2, "p90": 2, "p99": 2}
    assert summary["pass_rate"] == 1.0


def test_summarize_percentiles_and_failures():
    rows = []
    for seed in range(10):
        for r in range(1, 6):
            undecided = 0 if r > seed % 5 else 3
            if seed == 9:
                undecided = 1  # never converges
            rows.append({"seed": seed, "round": r, "undecided": undecided, "conflicts_cap": 0, "covering_violations": 0, "h_edges": ""})
    s = summarize(rows)
    assert s["seeds"] == 10 and s["converged"] == 9
    assert s["pass_rate"] == 0.9
    assert s["convergence_round"]["p50"] == 3
    assert "decay" not in s
