import json
import subprocess
import sys
from pathlib import Path

import pytest

from marginbound import experiments as ex
from marginbound.cli import main
from marginbound.data import gen_boolean_dnf, save_csv
from marginbound.ensemble import ConvexCombination, adaboost


def write_config(path, **raw):
    path.write_text(json.dumps(raw))
    return str(path)


def test_usage_errors_exit_1(tmp_path, capsys):
    with pytest.raises(SystemExit) as exc:
        main([])
    assert exc.value.code == 1
    with pytest.raises(SystemExit) as exc:
        main(["run", "--every", "x"])
    assert exc.value.code == 1
    bad = write_config(tmp_path / "bad.json", bogus=1, n=5, zzz=2)
    assert main(["run", "--config", bad]) == 1
    assert "bogus, zzz" in capsys.readouterr().err
    assert main(["run", "--config", str(tmp_path / "none.json")]) == 1
    assert main(["ratio", "--config", write_config(tmp_path / "t.json", dataset="twonorm")]) == 1


def test_data_errors_exit_2(tmp_path, capsys):
    cfg = write_config(tmp_path / "c.json", dataset="csv", **{"csv-path": str(tmp_path / "no.csv")})
    assert main(["gen", "--config", cfg]) == 2
    (tmp_path / "empty.csv").write_text("")
    assert main(["plot", str(tmp_path / "empty.csv")]) == 2
    (tmp_path / "r.csv").write_text("round,a\n1,0.5\n")
    assert main(["plot", str(tmp_path / "r.csv"), "--y", "b"]) == 2
    assert "missing column(s) b" in capsys.readouterr().err


def test_gen_writes_dataset(tmp_path):
    cfg = write_config(tmp_path / "c.json", dataset="twonorm", n=30, dim=4, **{"test-n": 10})
    assert main(["gen", "--config", cfg, "--output-dir", str(tmp_path / "g"), "--seed", "3"]) == 0
    rows = (tmp_path / "g" / "train.csv").read_text().splitlines()
    assert len(rows) == 30 and len(rows[0].split(",")) == 5
    assert len((tmp_path / "g" / "test.csv").read_text().splitlines()) == 10


def test_run_is_byte_identical(tmp_path):
    cfg = write_config(tmp_path / "c.json", n=150, rounds=20, bounds=list(ex.BOUNDS),
                       **{"rademacher-draws": 30})
    out = {}
    for k in "ab":
        assert main(["run", "--config", cfg, "--output-dir", str(tmp_path / k), "--every", "3"]) == 0
        out[k] = {p.relative_to(tmp_path / k): p.read_bytes()
                  for p in (tmp_path / k).rglob("*") if p.is_file()}
    configs = [json.loads(out[k].pop(Path("config.json"))) for k in "ab"]
    assert configs[0].pop("output-dir") != configs[1].pop("output-dir")
    assert configs[0] == configs[1]
    assert out["a"] == out["b"] and len(out["a"]) == 5
    assert main(["run", "--config", cfg, "--output-dir", str(tmp_path / "c"), "--seed", "1"]) == 0
    assert (tmp_path / "c" / "bounds.csv").read_bytes() != out["a"][Path("bounds.csv")]


def test_plot_is_deterministic(tmp_path):
    (tmp_path / "r.csv").write_text("round,a,b\n1,0.5,inf\n2,0.25,0.3\n3,0.1,0.2\n")
    for name in ("one.svg", "two.svg"):
        assert main(["plot", str(tmp_path / "r.csv"), "--out", str(tmp_path / name),
                     "--title", "t"]) == 0
    one = (tmp_path / "one.svg").read_bytes()
    assert one == (tmp_path / "two.svg").read_bytes()
    assert one.count(b"<path") > 0 and b"Date" not in one


def test_rademacher_command(tmp_path):
    cfg = write_config(tmp_path / "c.json", dataset="intervals")
    assert main(["rademacher", "--config", cfg, "--output-dir", str(tmp_path / "r"),
                 "--sizes", "40", "160", "--draws", "50"]) == 0
    header, cols = ex.read_csv_columns(tmp_path / "r" / "rademacher.csv")
    assert header == ["n", "mean", "se", "ratio"] and cols["n"].tolist() == [40, 160]


@pytest.fixture
def saved_model(tmp_path):
    ds = gen_boolean_dnf(120, 12, 0)
    save_csv(ds, tmp_path / "train.csv")
    adaboost(ds, 25).combination().save(tmp_path / "model.txt")
    return tmp_path


def test_doomlp_command(saved_model, capsys):
    d = saved_model
    args = ["doomlp", str(d / "model.txt"), str(d / "train.csv"), "--draws", "50"]
    assert main(args + ["--output-dir", str(d / "o1")]) == 0
    assert main(args + ["--output-dir", str(d / "o2")]) == 0
    names = ["model_doomlp.txt", "iterations.csv", "coefficients.csv", "delta_dimension.csv",
             "margin_cdf.csv", "summary.csv"]
    for name in names:
        assert (d / "o1" / name).read_bytes() == (d / "o2" / name).read_bytes()
    g = ConvexCombination.load(d / "o1" / "model_doomlp.txt")
    assert len(g) == 25 and abs(g.weights.sum() - 1) < 1e-9
    header, cols = ex.read_csv_columns(d / "o1" / "iterations.csv")
    assert header == ["iteration", "C_min", "C", "S_minus", "S_l", "S_0", "margin_cost", "accepted"]
    _, dd = ex.read_csv_columns(d / "o1" / "delta_dimension.csv")
    assert dd["Delta"].size == 101 and dd["before"][0] <= 25
    assert dd["before"][-1] == dd["after"][-1] == 0
    summary = dict(line.split(",") for line in (d / "o1" / "summary.csv").read_text().splitlines()[1:])
    assert float(summary["margin_cost_after"]) <= float(summary["margin_cost_before"]) + 1e-9


def test_doomlp_fixed_delta_and_errors(saved_model):
    d = saved_model
    assert main(["doomlp", str(d / "model.txt"), str(d / "train.csv"), "--delta", "0.4",
                 "--output-dir", str(d / "o")]) == 0
    assert "delta,0.4" in (d / "o" / "summary.csv").read_text()
    for bad in ("zero", "0", "1.5"):
        assert main(["doomlp", str(d / "model.txt"), str(d / "train.csv"), "--delta", bad]) == 1
    (d / "neg.txt").write_text("-0.5,0,0.5,LE\n1.5,1,0.5,LE\n")
    assert main(["doomlp", str(d / "neg.txt"), str(d / "train.csv")]) == 2
    (d / "wide.txt").write_text("1.0,40,0.5,LE\n")
    assert main(["doomlp", str(d / "wide.txt"), str(d / "train.csv")]) == 2


def test_identity_case_keeps_weights(tmp_path):
    (tmp_path / "m.txt").write_text("1.0,0,0.5,LE\n")
    (tmp_path / "d.csv").write_text("0.1,1\n0.9,-1\n0.2,1\n")
    assert main(["doomlp", str(tmp_path / "m.txt"), str(tmp_path / "d.csv"), "--delta", "0.5",
                 "--output-dir", str(tmp_path / "o")]) == 0
    _, cols = ex.read_csv_columns(tmp_path / "o" / "coefficients.csv")
    assert cols["before"].tolist() == cols["after"].tolist() == [1.0]


def test_console_script_entry_point(tmp_path):
    res = subprocess.run([sys.executable, "-m", "marginbound.cli", "--help"], capture_output=True,
                         text=True)
    assert res.returncode == 0 and "doomlp" in res.stdout
