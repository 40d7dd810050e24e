import json

from corrclust.cli import main
from corrclust.core import SignedGraph, write_instance


def test_run_generated(tmp_path, capsys):
    out = tmp_path / "r.json"
    code = main(["run", "--gen", "planted:4,4", "--noise", "0", "--seed", "1",
                 "--trials", "4", "--out", str(out)])
    assert code == 0
    rep = json.loads(out.read_text())
    assert rep["cost"] == 0
    assert rep["oracle"]["ratio_vs_opt"] == 1.0
    assert "ratio 1.0000" in capsys.readouterr().out


def test_run_reports_byte_identical(tmp_path):
    a, b = tmp_path / "a.json", tmp_path / "b.json"
    args = ["run", "--gen", "uniform:7", "--seed", "3", "--trials", "2"]
    assert main(args + ["--out", str(a)]) == 0
    assert main(args + ["--out", str(b)]) == 0
    assert a.read_bytes() == b.read_bytes()


def test_run_instance_file(tmp_path):
    g = SignedGraph(8, frozenset())
    path = tmp_path / "empty8.txt"
    path.write_text(write_instance(g))
    out = tmp_path / "rep.json"
    code = main(["run", "--instance", str(path), "--seed", "0", "--trials", "1",
                 "--out", str(out)])
    assert code == 0
    assert json.loads(out.read_text())["cost"] == 0


def test_run_malformed_instance(tmp_path, capsys):
    path = tmp_path / "bad.txt"
    path.write_text("n 3 default -\n0 1 +\n0 1 -\n")
    assert main(["run", "--instance", str(path), "--seed", "0"]) == 1
    assert "duplicate" in capsys.readouterr().err


def test_run_flag_validation(capsys):
    assert main(["run", "--seed", "0"]) == 1
    assert main(["run", "--gen", "nope:3", "--seed", "0"]) == 1
    assert main(["run", "--gen", "uniform", "--seed", "0"]) == 1  # n missing


def test_out_dir_env(tmp_path, monkeypatch):
    monkeypatch.setenv("CORRCLUST_OUT_DIR", str(tmp_path / "sub"))
    assert main(["run", "--gen", "uniform:6", "--seed", "2", "--trials", "1"]) == 0
    assert (tmp_path / "sub" / "run_seed2.json").exists()


def test_verify_passes(capsys):
    assert main(["verify", "--seed", "0", "--samples", "2000"]) == 0
    out = capsys.readouterr().out
    assert out.count("PASS") == 8 and "FAIL" not in out


def test_verify_catches_wrong_constant(capsys):
    code = main(["verify", "--seed", "0", "--samples", "500", "--f-constant", "1.4"])
    assert code == 1
    out = capsys.readouterr().out
    assert "FAIL" in out and "plus-budget-constant" in out


def test_verify_grid_step_usage_error(capsys):
    assert main(["verify", "--grid-step", "0.01"]) == 1
    assert "grid-step" in capsys.readouterr().err


def test_bench(tmp_path, capsys):
    out = tmp_path / "bench.csv"
    code = main(["bench", "--gen", "uniform", "--n", "6", "--count", "2",
                 "--seed", "5", "--trials", "2", "--out", str(out)])
    assert code == 0
    assert "max ratio_vs_opt" in capsys.readouterr().out
    lines = out.read_text().strip().splitlines()
    assert len(lines) == 3  # header + 2 rows
    # deterministic re-run
    out2 = tmp_path / "bench2.csv"
    main(["bench", "--gen", "uniform", "--n", "6", "--count", "2",
          "--seed", "5", "--trials", "2", "--out", str(out2)])
    assert out.read_text() == out2.read_text()


def test_bench_rejects_bad_n(capsys):
    assert main(["bench", "--n", "0", "--seed", "0"]) == 1
