import json

import numpy as np
import pytest

from oracles import bump_dataset
from shapelet_anomaly import fileformats as ff
from shapelet_anomaly.cli import main
from shapelet_anomaly.core import LabeledDataset
from shapelet_anomaly.preprocess import least_squares_line


def run(capsys, *argv):
    code = main([str(a) for a in argv])
    out, err = capsys.readouterr()
    return code, out, err


def error_of(err):
    return json.loads(err.strip().splitlines()[-1])


@pytest.fixture
def bump_csv(tmp_path):
    series, labels, _ = bump_dataset()
    p = tmp_path / "bump.csv"
    ff.write_dataset(p, LabeledDataset.from_arrays(series, labels))
    return p


def test_generate_is_deterministic(tmp_path, capsys):
    a, b = tmp_path / "a.csv", tmp_path / "b.csv"
    assert run(capsys, "generate", "--per-class", 2, "--length", 50, "--seed", 7, "--out", a)[0] == 0
    assert run(capsys, "generate", "--per-class", 2, "--length", 50, "--seed", 7, "--out", b)[0] == 0
    assert a.read_bytes() == b.read_bytes()
    assert len(a.read_text().splitlines()) == 15
    man = json.loads((tmp_path / "a.csv.manifest.json").read_text())
    assert man["command"] == "generate" and man["seeds"] == {"seed": 7}
    assert set(man) == {"command", "config", "seeds", "inputs", "outputs", "duration_s", "version"}


def test_generate_realistic(tmp_path, capsys):
    out = tmp_path / "r.csv"
    assert run(capsys, "generate", "--preset", "realistic", "--total", 100, "--length", 20, "--out", out)[0] == 0
    assert len(ff.read_dataset(out)) == 100


def test_generate_invalid_counts(tmp_path, capsys):
    code, _, err = run(capsys, "generate", "--per-class", 0, "--out", tmp_path / "x.csv")
    assert code == 2 and error_of(err)["error"] == "InvalidArgs"
    assert not (tmp_path / "x.csv").exists()


def test_unknown_flag_is_invalid_args(capsys):
    code, _, err = run(capsys, "discover", "--bogus")
    assert code == 2 and error_of(err)["exit_code"] == 2


def test_discover_bump(bump_csv, tmp_path, capsys):
    out = tmp_path / "sh.json"
    code, stdout, _ = run(capsys, "discover", "--train", bump_csv, "--out", out,
                          "--len-stride", 1, "--pos-stride", 1, "--sample-fraction", 1)
    assert code == 0 and "candidates" in stdout
    doc = json.loads(out.read_text())
    assert doc["shapelets"][0]["info_gain"] == 1.0
    assert doc["config"]["max_shapelets"] == 200 and doc["config"]["ig_threshold"] == 0.05
    assert "elapsed_s" not in doc["stats"]


def test_discover_errors(bump_csv, tmp_path, capsys):
    code, _, err = run(capsys, "discover", "--train", bump_csv, "--out", tmp_path / "a.json",
                       "--ig-threshold", 1.1, "--max-len", 6)
    assert code == 4 and error_of(err)["error"] == "NoShapeletsFound"
    assert not (tmp_path / "a.json").exists()
    code, _, err = run(capsys, "discover", "--train", bump_csv, "--out", tmp_path / "b.json", "--min-len", 2)
    assert code == 2
    code, _, err = run(capsys, "discover", "--train", tmp_path / "none.csv", "--out", tmp_path / "c.json")
    assert code == 5 and error_of(err)["error"] == "IoError"
    bad = tmp_path / "bad.csv"
    bad.write_text("label,t0,t1,t2\n1,0,1,2\n9,1,2,3\n")
    code, _, err = run(capsys, "discover", "--train", bad, "--out", tmp_path / "d.json")
    assert code == 3 and "row 3" in error_of(err)["message"]


def test_pipeline_and_reproducibility(tmp_path, capsys):
    d = tmp_path
    assert run(capsys, "generate", "--per-class", 6, "--length", 300, "--seed", 1, "--out", d / "tr.csv")[0] == 0
    assert run(capsys, "generate", "--per-class", 3, "--length", 300, "--seed", 2, "--out", d / "te.csv")[0] == 0

    def pipeline(tag, threads):
        assert run(capsys, "discover", "--train", d / "tr.csv", "--out", d / f"sh{tag}.json",
                   "--max-shapelets", 21, "--candidate-budget", 1500, "--threads", threads)[0] == 0
        for name in ("tr", "te"):
            assert run(capsys, "transform", "--data", d / f"{name}.csv", "--shapelets", d / f"sh{tag}.json",
                       "--out", d / f"{name}{tag}.G.csv", "--threads", threads)[0] == 0
        assert run(capsys, "train", "--train", d / f"tr{tag}.G.csv", "--out", d / f"m{tag}.json",
                   "--trees", 30, "--seed", 7, "--threads", threads)[0] == 0
        code, out, _ = run(capsys, "evaluate", "--model", d / f"m{tag}.json", "--test", d / f"te{tag}.G.csv",
                           "--report", d / f"r{tag}.json", "--confusion", d / f"c{tag}.csv")
        assert code == 0 and "accuracy" in out

    pipeline("a", 1)
    pipeline("b", 3)
    for stem in ("sh{}.json", "tr{}.G.csv", "m{}.json", "r{}.json", "c{}.csv"):
        assert (d / stem.format("a")).read_bytes() == (d / stem.format("b")).read_bytes(), stem
    G = ff.read_transform(d / "tra.G.csv")
    shapelets, _ = ff.read_shapelets(d / "sha.json")
    assert (G.rows, G.cols) == (42, len(shapelets))
    for j, sh in enumerate(shapelets):
        assert G.values[sh.source_series_index, j] == 0.0
    report = json.loads((d / "ra.json").read_text())
    assert len(report["classes"]) == 7 and 0 <= report["accuracy"] <= 1
    assert (d / "ra.json.manifest.json").exists()


def test_evaluate_mismatched_shapelets(tmp_path, capsys):
    d = tmp_path
    run(capsys, "generate", "--per-class", 3, "--length", 80, "--out", d / "tr.csv")
    run(capsys, "discover", "--train", d / "tr.csv", "--out", d / "s1.json", "--max-shapelets", 7)
    run(capsys, "discover", "--train", d / "tr.csv", "--out", d / "s2.json", "--max-shapelets", 14)
    run(capsys, "transform", "--data", d / "tr.csv", "--shapelets", d / "s1.json", "--out", d / "g1.csv")
    run(capsys, "transform", "--data", d / "tr.csv", "--shapelets", d / "s2.json", "--out", d / "g2.csv")
    run(capsys, "train", "--train", d / "g1.csv", "--out", d / "m.json", "--trees", 3)
    code, _, err = run(capsys, "evaluate", "--model", d / "m.json", "--test", d / "g2.csv", "--report", d / "r.json")
    assert code == 4 and error_of(err)["error"] == "FeatureLengthMismatch"


def test_train_twice_identical(tmp_path, capsys):
    d = tmp_path
    run(capsys, "generate", "--per-class", 3, "--length", 80, "--out", d / "tr.csv")
    run(capsys, "discover", "--train", d / "tr.csv", "--out", d / "s.json", "--max-shapelets", 7)
    run(capsys, "transform", "--data", d / "tr.csv", "--shapelets", d / "s.json", "--out", d / "g.csv")
    for k in (1, 2):
        assert run(capsys, "train", "--train", d / "g.csv", "--out", d / f"m{k}.json", "--trees", 1, "--seed", 7)[0] == 0
    assert (d / "m1.json").read_bytes() == (d / "m2.json").read_bytes()


def test_train_single_class(tmp_path, capsys):
    p = tmp_path / "g.csv"
    p.write_text("a,label\n1.0,1\n2.0,1\n")
    code, _, err = run(capsys, "train", "--train", p, "--out", tmp_path / "m.json")
    assert code == 4 and error_of(err)["error"] == "SingleClassTrainingSet"


def test_transform_empty_shapelet_file(bump_csv, tmp_path, capsys):
    s = tmp_path / "s.json"
    ff.write_shapelets(s, [])
    code, _, err = run(capsys, "transform", "--data", bump_csv, "--shapelets", s, "--out", tmp_path / "g.csv")
    assert code == 4 and error_of(err)["error"] == "EmptyShapeletSet"


def test_preprocess(tmp_path, capsys):
    d = tmp_path
    run(capsys, "generate", "--per-class", 1, "--length", 120, "--raw", "--seed", 3, "--out", d / "raw.csv")
    env = d / "env.csv"
    assert run(capsys, "preprocess", "--in", d / "raw.csv", "--out", env, "--sample-rate", 20,
               "--envelope-window", 20, "--downsample", 20)[0] == 0
    ds = ff.read_dataset(env)
    assert all(len(ts) == 120 for ts in ds.series)
    man = json.loads((d / "env.csv.manifest.json").read_text())
    assert man["config"]["output_sample_rate_hz"] == 1.0

    run(capsys, "generate", "--per-class", 2, "--length", 200, "--out", d / "g.csv")
    assert run(capsys, "preprocess", "--in", d / "g.csv", "--out", d / "same.csv")[0] == 0
    assert (d / "same.csv").read_bytes() == (d / "g.csv").read_bytes()
    assert run(capsys, "preprocess", "--in", d / "g.csv", "--out", d / "dt.csv", "--remove-outliers", "--detrend")[0] == 0
    for ts, lab in ff.read_dataset(d / "dt.csv"):
        assert abs(least_squares_line(ts.samples)[0]) < 1e-9

    code, _, err = run(capsys, "preprocess", "--in", d / "g.csv", "--out", d / "w.csv", "--envelope-window", 500)
    assert code == 4 and error_of(err)["error"] == "WindowTooLarge"
