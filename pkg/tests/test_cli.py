import csv
import json
import subprocess
import sys

import pytest

from dyadic_fs.cli import RunConfig, main
from dyadic_fs.gridio import read_grid_function
from dyadic_fs.lab.params import TheoremParams
from dyadic_fs.lab.reports import validate_report
from dyadic_fs.lab.verify import verify_remark_1_4


def write(path, text):
    path.write_text(text)
    return str(path)


def test_maximal_constant_is_fixed(tmp_path):
    src = write(tmp_path / "f.csv", "1,2\n2,2,2,2\n")
    out = tmp_path / "m.csv"
    assert main(["maximal", src, "--alpha", "0", "--out", str(out)]) == 0
    assert out.read_bytes() == (tmp_path / "f.csv").read_bytes()


def test_maximal_matches_closed_form(tmp_path):
    vals = ["0"] * 16
    for i in (4, 5, 6, 7):  # the level-2 cube with index 1
        vals[i] = "1"
    src = write(tmp_path / "f.csv", "1,4\n" + ",".join(vals) + "\n")
    a, b = tmp_path / "a.csv", tmp_path / "b.csv"
    assert main(["maximal", src, "--alpha", "0.5", "--out", str(a)]) == 0
    assert main(["maximal", src, "--alpha", "0.5", "--closed-form", "2 1", "--out", str(b)]) == 0
    assert a.read_bytes() == b.read_bytes()


def test_maximal_errors(tmp_path, capsys):
    bad = write(tmp_path / "bad.csv", "1,1\n1,x\n")
    assert main(["maximal", bad]) == 2
    assert "line 2" in capsys.readouterr().err
    good = write(tmp_path / "g.csv", "1,1\n1,0\n")
    assert main(["maximal", good, "--alpha", "1.0"]) == 3
    assert main(["maximal", good, "--alpha", "-0.5"]) == 3
    assert main(["maximal", str(tmp_path / "missing.csv")]) == 2


def test_content_outputs(tmp_path, capsys):
    empty = write(tmp_path / "e.set", "1,1\n0,0\n")
    assert main(["content", empty, "--d", "1"]) == 0
    assert capsys.readouterr().out == "0\n"

    one = write(tmp_path / "s.set", "1,1\n0,1\n")
    w = write(tmp_path / "w.csv", "1,1\n1,3\n")
    assert main(["content", one, "--weight", w, "--d", "1"]) == 0
    assert capsys.readouterr().out == "1.5\n1 1\n"

    full = write(tmp_path / "f.set", "2,2\n" + ",".join(["1"] * 16) + "\n")
    assert main(["content", full, "--d", "2"]) == 0
    assert capsys.readouterr().out == "1\n0 0 0\n"

    assert main(["content", full, "--d", "2.5"]) == 3
    assert main(["content", full, "--d", "0"]) == 3


def test_verify_zero_trials(tmp_path):
    out = tmp_path / "o"
    code = main(["verify", "strong", "--n", "2", "--L", "3", "--d", "1.5", "--alpha", "0.5",
                 "--gamma", "0.25", "--p", "1", "--q", "1.5", "--trials", "0", "--out", str(out)])
    assert code == 0
    assert (out / "report.jsonl").read_text() == ""


def test_verify_prints_delta(tmp_path, capsys):
    out = tmp_path / "o"
    main(["verify", "strong", "--n", "2", "--L", "4", "--d", "1.5", "--alpha", "0.5",
          "--gamma", "0.25", "--p", "1", "--q", "1.5", "--trials", "2", "--out", str(out)])
    assert "delta=1.875 " in capsys.readouterr().out
    rows = list(csv.DictReader(open(out / "summary.csv")))
    assert rows[0]["delta"] == "1.875"
    for line in open(out / "report.jsonl"):
        assert validate_report(json.loads(line)) == []


def test_verify_inadmissible(tmp_path, capsys):
    code = main(["verify", "strong", "--n", "2", "--L", "3", "--d", "1.5", "--alpha", "0.5",
                 "--p", "0.5", "--q", "1.5", "--out", str(tmp_path / "o")])
    assert code == 3
    assert "requires d/n < p" in capsys.readouterr().err


def test_verify_adams_deterministic(tmp_path):
    args = ["verify", "adams", "--n", "2", "--L", "3", "--d", "1", "--alpha", "0.5",
            "--p", "1", "--q", "1.5", "--trials", "20", "--seed", "3"]
    assert main(args + ["--out", str(tmp_path / "a")]) == 0
    assert main(args + ["--out", str(tmp_path / "b")]) == 0
    for name in ("summary.csv", "report.jsonl"):
        assert (tmp_path / "a" / name).read_bytes() == (tmp_path / "b" / name).read_bytes()


def test_verify_conjectured_candidate_exit_zero(tmp_path):
    code = main(["verify", "remark14-weak", "--n", "2", "--L", "3", "--d", "1", "--alpha", "0.5",
                 "--q", "0.75", "--w-gen", "indicator", "--trials", "10",
                 "--out", str(tmp_path / "o")])
    assert code == 0
    rec = json.loads((tmp_path / "o" / "report.jsonl").read_text().splitlines()[0])
    assert "candidate" in rec


def test_config_file_and_override(tmp_path):
    cfg = write(tmp_path / "c.toml", 'n = 2\nL = 3\nd = 1.5\nalpha = 0.5\ngamma = 0.25\n'
                                     'p = 1.0\nq = 1.5\ntrials = 3\nseed = 5\n'
                                     f'out = "{tmp_path / "x"}"\n')
    assert main(["verify", "strong", "--config", cfg, "--trials", "2", "--out", str(tmp_path / "y")]) == 0
    stored = json.loads((tmp_path / "y" / "config.json").read_text())
    assert stored["trials"] == 2 and stored["seed"] == 5 and stored["L"] == 3
    assert not (tmp_path / "x").exists()
    bad = write(tmp_path / "bad.toml", "n = [\n")
    assert main(["verify", "strong", "--config", bad]) == 2


def test_config_points(tmp_path):
    cfg = write(tmp_path / "c.toml",
                'n = 2\nL = 3\nalpha = 0.5\ntrials = 2\n'
                '[[points]]\nd = 1.5\ngamma = 0.25\np = 1.0\nq = 1.5\n'
                '[[points]]\nd = 1.2\np = 1.0\nq = 2.0\n')
    assert main(["verify", "strong", "--config", cfg, "--out", str(tmp_path / "o")]) == 0
    rows = list(csv.DictReader(open(tmp_path / "o" / "summary.csv")))
    assert [r["d"] for r in rows] == ["1.5", "1.2"]


def test_run_config_round_trip():
    cfg = RunConfig(d=1.5, q=1.5, p=1.0, points=[{"d": 1.0}], depths=[3, 4])
    again = RunConfig.from_dict(json.loads(cfg.canonical()))
    assert again == cfg and again.canonical() == cfg.canonical()


def test_search_single_equals_verify(tmp_path):
    common = ["--n", "2", "--L", "3", "--d", "1", "--alpha", "0.5", "--q", "0.75", "--seed", "4"]
    assert main(["search", "remark14-weak", *common, "--steps", "0", "--batch", "1",
                 "--depths", "3", "--out", str(tmp_path / "s")]) == 0
    assert main(["verify", "remark14-weak", *common, "--trials", "1",
                 "--out", str(tmp_path / "v")]) == 0
    s = json.loads((tmp_path / "s" / "report.jsonl").read_text())
    v = json.loads((tmp_path / "v" / "report.jsonl").read_text())
    for key in ("lhs", "rhs", "ratio", "instance_digest", "seed", "params"):
        assert s[key] == v[key]


def test_search_replay_and_trajectory(tmp_path):
    out = tmp_path / "s"
    assert main(["search", "remark14-weak", "--n", "2", "--d", "1", "--alpha", "0.5", "--q", "0.75",
                 "--steps", "15", "--batch", "2", "--depths", "3,4,5", "--out", str(out)]) == 0
    traj = list(csv.DictReader(open(out / "trajectory.csv")))
    assert [r["L"] for r in traj] == ["3", "4", "5"]
    for row in traj:
        L = int(row["L"])
        f = read_grid_function(out / f"best_L{L}_f.csv")
        w = read_grid_function(out / f"best_L{L}_w.csv")
        tp = TheoremParams.weak(2, L, 1.0, 0.5, 0.0, 0.75)
        r = verify_remark_1_4(f, w, tp, "weak").ratio
        assert r == pytest.approx(float(row["best_ratio"]), rel=1e-12)


def test_entry_point_runs(tmp_path):
    src = write(tmp_path / "f.csv", "1,1\n1,0\n")
    res = subprocess.run([sys.executable, "-m", "dyadic_fs.cli", "maximal", src, "--alpha", "0.5"],
                         capture_output=True, text=True)
    assert res.returncode == 0
    assert res.stdout.splitlines()[0] == "1,1"
