import csv
import io
import json

import pytest

from chizeta.cli import main
from chizeta.graph import Graph
from chizeta.graphio import to_dimacs


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def test_moments(capsys):
    code, out, _ = run(capsys, "moments", "--n", "10000")
    d = json.loads(out)
    assert code == 0
    assert {"n", "alpha0", "alpha", "log_mu_alpha", "exponent", "window_holds"} <= set(d)
    assert d["alpha"] == 20


def test_fraction(capsys, tmp_path):
    path = tmp_path / "f.csv"
    code, _, _ = run(capsys, "fraction", "--n-max", "2000", "--eps", "0.1", "--out", str(path))
    lines = path.read_text().splitlines()
    assert code == 0
    assert lines[0] == "n,exponent,holds"
    assert len(lines) == 1 + 1998 + 1
    assert lines[-1].startswith("# summary")


def test_threshold_and_profile(capsys):
    code, out, _ = run(capsys, "threshold", "--n", "4", "--t", "2", "--method", "exact")
    assert code == 0 and json.loads(out)["k_threshold"] == 3
    code, out, _ = run(capsys, "--format", "csv", "profile", "--n", "1000", "--k", "80")
    rows = list(csv.reader(io.StringIO(out)))
    assert rows[0] == ["u", "k_u"]
    assert sum(int(u) * int(c) for u, c in rows[1:]) == 1000
    assert sum(int(c) for _, c in rows[1:]) == 80


def test_sample_and_solve(capsys, tmp_path):
    code, out, _ = run(capsys, "sample", "--n", "7", "--seed", "3")
    assert code == 0
    again = run(capsys, "sample", "--n", "7", "--seed", "3")[1]
    assert out == again
    path = tmp_path / "c5.col"
    path.write_text(to_dimacs(Graph.cycle(5)))
    code, out, _ = run(capsys, "solve", "--graph", str(path), "--t", "2", "--profile", "2:2,1:1")
    d = json.loads(out)
    assert code == 0
    assert (d["chi"], d["zeta"], d["chi_t"]) == (3, 3, 3)
    assert d["counts"]["colourings"]["unordered"] == 5


def test_verify_prop(capsys):
    code, out, _ = run(capsys, "verify-prop", "--n", "4", "--profile", "2:2")
    d = json.loads(out)
    assert code == 0 and d["ratio"] == "4" and d["equality_holds"]
    code, out, _ = run(capsys, "verify-prop", "--n", "4", "--profile", "2:2", "--mode", "secondmoment",
                       "--u-star", "2", "--alpha", "3")
    d = json.loads(out)
    assert code == 0 and d["mode"] == "secondmoment"


def test_classify_pairs(capsys):
    code, out, _ = run(capsys, "--seed", "4", "classify-pairs", "--n", "12", "--profile", "3:4",
                       "--pairs", "5", "--alpha", "5")
    d = json.loads(out)
    assert code == 0 and len(d["pairs"]) == 5
    assert all(p["band"] in ("scrambled", "middle", "similar") for p in d["pairs"])


def test_experiment(capsys, tmp_path):
    cfg = tmp_path / "exp.cfg"
    cfg.write_text("n_list = 8\nsamples = 2\nseed = 1\n")
    code, out, _ = run(capsys, "experiment", "--config", str(cfg), "--samples", "3")
    d = json.loads(out)
    assert code == 0 and len(d["records"][0]["sampling"]["samples"]) == 3
    code2, out2, _ = run(capsys, "experiment", "--config", str(cfg), "--samples", "3")
    assert out == out2


@pytest.mark.parametrize("argv", [
    ["moments", "--n", "10", "--eps", "0.6"],
    ["moments", "--n", "2"],
    ["verify-prop", "--n", "4", "--profile", "1:4"],
    ["threshold", "--n", "100", "--t", "1"],
    ["experiment", "--n-list", "2"],
    ["fraction", "--n-max", "10"],
    ["solve", "--graph", "/nonexistent/graph.json"],
])
def test_precondition_exit_code(capsys, argv):
    code, _, err = run(capsys, *argv)
    assert code == 2
    assert "error" in err


def test_nonconvergence_exit_code(capsys, monkeypatch):
    from chizeta import cli
    from chizeta.profile_opt import NonConvergence

    def boom(*a, **k):
        raise NonConvergence("cap reached", {"b": 0})

    monkeypatch.setattr(cli, "first_moment_threshold", boom)
    code, _, err = run(capsys, "threshold", "--n", "50", "--t", "5")
    assert code == 3 and "non-convergence" in err
