import json

import numpy as np
import pytest

from graphtest import __version__
from graphtest.cli import main
from graphtest.io import parse_edge_list, read_tsv


@pytest.fixture
def graph_file(tmp_path):
    p = tmp_path / "g.txt"
    assert main(["gen-graph", "--family", "cycle", "--n", "20", "--seed", "0", "--out", str(p)]) == 0
    return p


@pytest.fixture
def score_file(tmp_path):
    p = tmp_path / "x.txt"
    p.write_text("\n".join(repr(v) for v in (np.random.default_rng(0).standard_normal(20) + 1.0).tolist()))
    return p


def test_gen_graph(graph_file):
    g = parse_edge_list(graph_file)
    assert g.n == 20 and g.n_edges == 20


def test_test_command(tmp_path, graph_file, score_file):
    out = tmp_path / "r.json"
    assert main(["test", "--graph", str(graph_file), "--scores", str(score_file), "--B", "99",
                 "--seed", "1", "--set", "demo", "--out", str(out)]) == 0
    rec = json.loads(out.read_text())
    assert rec["set"] == "demo" and rec["B"] == 99 and rec["p_value"] == pytest.approx(0.01)
    assert set(rec) >= {"statistic", "value", "lambda_star", "p_value", "seed"}


def test_test_command_with_universe(tmp_path, graph_file, score_file):
    uni = tmp_path / "u.txt"
    uni.write_text("".join(f"g{i} {v!r}\n" for i, v in enumerate(np.linspace(-2, 2, 50).tolist())))
    out = tmp_path / "r.json"
    assert main(["test", "--graph", str(graph_file), "--scores", str(score_file), "--B", "50",
                 "--seed", "1", "--universe", str(uni), "--out", str(out)]) == 0
    assert 0 < json.loads(out.read_text())["p_value"] <= 1


def test_calibrate_tsv(tmp_path, graph_file):
    out = tmp_path / "c.tsv"
    assert main(["calibrate", "--graph", str(graph_file), "--stat", "chi2", "--B", "10",
                 "--seed", "2", "--out", str(out)]) == 0
    meta, header, rows = read_tsv(out)
    assert header == ["replicate", "value"] and len(rows) == 10
    assert meta["version"] == __version__ and meta["seed"] == 2


def test_simulate_signal_sidecar(tmp_path, graph_file):
    out = tmp_path / "mu.tsv"
    assert main(["simulate-signal", "--graph", str(graph_file), "--xi1", "1", "--xi2", "0.3",
                 "--seed", "3", "--out", str(out)]) == 0
    side = json.loads((tmp_path / "mu.tsv.json").read_text())
    assert side["achieved_energy"] == pytest.approx(20.0, rel=1e-9)
    _, header, rows = read_tsv(out)
    assert header == ["node_id", "mu_value"] and len(rows) == 20


def test_infeasible_exit_code(tmp_path, graph_file):
    assert main(["simulate-signal", "--graph", str(graph_file), "--xi1", "0", "--xi2", "0.9",
                 "--seed", "3", "--out", str(tmp_path / "m.tsv")]) == 4


def test_data_error_exit_code(tmp_path, graph_file):
    bad = tmp_path / "bad.txt"
    bad.write_text("1\n2\n")
    assert main(["test", "--graph", str(graph_file), "--scores", str(bad), "--B", "10", "--seed", "0"]) == 3
    assert main(["test", "--graph", str(tmp_path / "missing"), "--scores", str(bad), "--B", "10",
                 "--seed", "0"]) == 3


def test_usage_errors(graph_file, score_file):
    with pytest.raises(SystemExit) as exc:
        main(["test", "--graph", str(graph_file), "--scores", str(score_file)])  # no seed
    assert exc.value.code == 2
    assert main(["smooth", "--graph", str(graph_file), "--scores", str(score_file), "--lambda", "-1"]) == 2


def test_smooth_and_fdr(tmp_path, graph_file, score_file):
    out = tmp_path / "s.tsv"
    assert main(["smooth", "--graph", str(graph_file), "--scores", str(score_file),
                 "--lambda", "inf", "--out", str(out)]) == 0
    _, _, rows = read_tsv(out)
    x = np.loadtxt(score_file)
    # connected graph: every node gets the mean
    np.testing.assert_allclose([float(r[1]) for r in rows], x.mean(), atol=1e-12)
    pv = tmp_path / "p.tsv"
    pv.write_text("a 0.001\nb 0.5\n")
    out = tmp_path / "f.tsv"
    assert main(["fdr", "--pvalues", str(pv), "--q", "0.05", "--out", str(out)]) == 0
    _, header, rows = read_tsv(out)
    assert header == ["id", "p_value", "rejected", "q"]
    assert [r[2] for r in rows] == ["1", "0"]


def test_power_surface_small(tmp_path):
    out = tmp_path / "ps.tsv"
    assert main(["power-surface", "--B", "1000", "--step", "1", "--seed", "0", "--out", str(out)]) == 0
    meta, header, rows = read_tsv(out)
    assert len(rows) == 4 * 5 and "min_ratio_z" in meta


def test_boundary_small(tmp_path):
    out = tmp_path / "b.tsv"
    assert main(["boundary", "--family", "cycle", "--n", "30", "--grid", "3", "--replicates", "3",
                 "--B", "50", "--seed", "0", "--out", str(out)]) == 0
    meta, header, rows = read_tsv(out)
    assert header == ["xi1", "xi2", "rejection_freq", "n_feasible"] and len(rows) == 9
    assert json.loads((tmp_path / "b.tsv.json").read_text())["cells"] == 9


def test_stdout_output(capsys):
    assert main(["gen-graph", "--family", "star", "--n", "3", "--seed", "0"]) == 0
    assert capsys.readouterr().out == "n 3\n0 1\n0 2\n"
