import json
import shutil
import subprocess

import pytest

from monobayes import estimation
from monobayes.cli import main
from monobayes.data.corpus import model_source, raw_table


@pytest.fixture
def haberman_files(tmp_path):
    raw = tmp_path / "haberman.csv"
    table = raw_table("haberman")
    raw.write_text(",".join(table.columns) + "\n" + "\n".join(",".join(r) for r in table.rows))
    model = tmp_path / "haberman.bn"
    model.write_text(model_source("haberman"))
    return raw, model


def test_fit_from_corpus(tmp_path):
    out = tmp_path / "fit.json"
    assert main(["fit", "--corpus", "haberman", "--out", str(out), "--strict"]) == 0
    doc = json.loads(out.read_text())
    assert doc["report"]["converged"]
    assert doc["report"]["nodes"]["class"]["mle_feasible"] is False
    assert doc["cpts"]["class"]["parents"] == ["age", "year", "nodes"]


def test_epsilon_above_cap_is_rejected(caplog):
    assert main(["fit", "--corpus", "haberman", "--epsilon", "0.25"]) == 1
    assert any(r.levelname == "WARNING" for r in caplog.records)


def test_strict_non_convergence_exits_two(tmp_path, monkeypatch):
    monkeypatch.setattr(estimation, "_inner_maximise",
                        lambda mu, counts, nc, w, config: (mu, 1, False, "forced"))
    args = ["fit", "--corpus", "haberman", "--out", str(tmp_path / "f.json")]
    assert main(args) == 0
    assert main(args + ["--strict"]) == 2


def test_check_lists_violations(tmp_path):
    out = tmp_path / "check.json"
    assert main(["check", "--corpus", "haberman", "--out", str(out)]) == 0
    doc = json.loads(out.read_text())
    assert not doc["feasible"] and doc["n_constraints"] == 12
    assert set(doc["violations"][0]) == {"node", "j_hi", "j_lo", "kc", "delta"}


def test_discretize_then_fit_and_predict(tmp_path, haberman_files):
    raw, model = haberman_files
    coded = tmp_path / "coded.csv"
    assert main(["discretize", "--input", str(raw), "--corpus", "haberman",
                 "--bins", "3", "--out", str(coded)]) == 0
    cuts = json.loads((tmp_path / "coded.csv.cuts.json").read_text())
    assert cuts["rows"] == 306 and set(cuts["cutpoints"]) == {"age", "year", "nodes"}
    assert coded.read_text().splitlines()[0] == "age,year,nodes,class"
    assert main(["fit", "--data", str(coded), "--model", str(model),
                 "--out", str(tmp_path / "fit.json")]) == 0
    preds = {}
    for label in ("KB", "CKB0"):
        preds[label] = tmp_path / f"{label}.csv"
        assert main(["predict", "--data", str(coded), "--model", str(model),
                     "--test", str(coded), "--classifier", label, "--out", str(preds[label])]) == 0
    out = tmp_path / "mc.json"
    assert main(["mcnemar", "--a", str(preds["KB"]), "--b", str(preds["CKB0"]),
                 "--out", str(out)]) == 0
    assert {"b", "c", "statistic", "significant", "winner"} <= set(json.loads(out.read_text()))


def test_generic_discretize_needs_a_class(tmp_path, haberman_files):
    raw, _ = haberman_files
    assert main(["discretize", "--input", str(raw), "--out", str(tmp_path / "x.csv")]) == 1
    assert main(["discretize", "--input", str(raw), "--class", "survival",
                 "--out", str(tmp_path / "x.csv")]) == 0


def test_bad_inputs_exit_one(tmp_path):
    assert main(["fit", "--corpus", "iris"]) == 1
    assert main(["fit", "--data", str(tmp_path / "missing.csv"),
                 "--model", str(tmp_path / "m.bn")]) == 1
    bad = tmp_path / "bad.bn"
    bad.write_text("var a 2\nedge a -> b q*\n")
    data = tmp_path / "d.csv"
    data.write_text("a\n0\n")
    assert main(["check", "--data", str(data), "--model", str(bad)]) == 1
    spec = tmp_path / "spec.json"
    spec.write_text('{"dataset": "haberman", "sizes": [500]}')
    assert main(["curve", "--spec", str(spec), "--out", str(tmp_path / "o")]) == 1


def test_mcnemar_rejects_mismatched_files(tmp_path):
    a, b = tmp_path / "a.csv", tmp_path / "b.csv"
    a.write_text("instance_id,true,predicted,p_class1\n0,1,1,0.9\n")
    b.write_text("instance_id,true,predicted,p_class1\n1,1,1,0.9\n")
    assert main(["mcnemar", "--a", str(a), "--b", str(b)]) == 1


def test_curve_writes_reports(tmp_path):
    spec = tmp_path / "spec.json"
    spec.write_text(json.dumps({"dataset": "haberman", "classifiers": ["ZR", "CKB0"],
                                "sizes": [3], "replications": 2}))
    assert main(["curve", "--spec", str(spec), "--out", str(tmp_path / "o")]) == 0
    assert sorted(p.name for p in (tmp_path / "o").iterdir()) == [
        "curve.csv", "manifest.json", "mcnemar.csv"]


@pytest.mark.skipif(shutil.which("monobayes") is None, reason="console script not installed")
def test_console_script():
    proc = subprocess.run(["monobayes", "--version"], capture_output=True, text=True)
    assert proc.returncode == 0 and proc.stdout.strip()
