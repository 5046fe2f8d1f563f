import json
import subprocess
import sys

import pytest

from softcompare.cli import main
from softcompare.io import write_clustering
from softcompare.model import Frame, HardClustering, RoughClustering, SoftClustering


@pytest.fixture
def files(tmp_path, fixture_e, c_hard):
    e, h = tmp_path / "e.json", tmp_path / "h.json"
    write_clustering(fixture_e, e)
    write_clustering(SoftClustering.from_hard(c_hard), h)
    return str(e), str(h)


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr().out
    return code, out


def test_compare_fixture_e(capsys, files):
    code, out = run(capsys, "compare", *files, "--measure", "rand", "--mode", "exact", "--output", "json")
    assert code == 0
    doc = json.loads(out)
    assert doc["result"]["expectations"] == pytest.approx([0.0, 4 / 15])
    assert doc["result"]["similarity"] == pytest.approx([11 / 15, 1.0])
    assert doc["inputs"][0]["sha256"] and "seconds" in doc


def test_compare_identical_hard(capsys, files):
    code, out = run(capsys, "compare", files[1], files[1], "--output", "json")
    doc = json.loads(out)
    assert code == 0
    assert doc["result"]["distance"] == 0.0 and doc["result"]["similarity"] == 1.0
    assert doc["seconds"] >= 0


def test_compare_budget_error(capsys, tmp_path):
    f = Frame.of_size(3)
    big, h = tmp_path / "big.json", tmp_path / "h.json"
    write_clustering(RoughClustering(f, (0b111,) * 20), big)
    write_clustering(HardClustering(f, (0,) * 20), h)
    code, out = run(capsys, "compare", str(big), str(h), "--output", "json")
    assert code != 0
    err = json.loads(out)
    assert err["error"] == "BudgetExceeded"
    assert err["count"] == 3 ** 20
    assert "--mode sample --samples 4612" in err["message"]


def test_sampled_reports_are_reproducible(capsys, files):
    args = ["compare", *files, "--mode", "sample", "--samples", "3000", "--seed", "5", "--output", "json"]
    _, a = run(capsys, *args)
    _, b = run(capsys, *args, "--threads", "3")
    da, db = json.loads(a), json.loads(b)
    da.pop("seconds"), db.pop("seconds")
    da["params"].pop("budget"), db["params"].pop("budget")
    assert da == db
    assert da["counts"]["samples"] == 3000 and da["counts"]["hoeffding_epsilon"] > 0


def test_compare_with_dataset_labels(capsys, tmp_path):
    csv = tmp_path / "d.csv"
    csv.write_text("x,cls\n1,a\n2,a\n9,b\n")
    c = tmp_path / "c.json"
    write_clustering(HardClustering(Frame.of_size(2), (1, 1, 0)), c)
    code, out = run(capsys, "compare", str(c), "--dataset", str(csv), "--label-col", "cls", "--output", "json")
    assert code == 0 and json.loads(out)["result"]["distance"] == 0.0


def test_validation_error_json(capsys, tmp_path):
    p = tmp_path / "bad.json"
    p.write_text(json.dumps({"format": "softcompare.clustering", "version": 1, "kind": "fuzzy",
                             "frame": ["w1", "w2"], "objects": [[0.5, 0.4], [1, 0]]}))
    code, out = run(capsys, "compare", str(p), str(p), "--output", "json")
    assert code != 0 and json.loads(out)["error"] == "MassSumViolation"
    code, out = run(capsys, "compare", str(tmp_path / "missing.json"), str(p), "--output", "json")
    assert code != 0 and "error" in json.loads(out)


def test_axioms_commands(capsys):
    code, out = run(capsys, "axioms", "--measure", "partition", "--n", "4", "--exhaustive", "--output", "json")
    doc = json.loads(out)
    assert code == 0 and doc["verdict"] == "metric" and doc["points"] == 15
    _, out = run(capsys, "axioms", "--measure", "upper", "--n", "3", "--k", "2", "--count", "10", "--versus-hard",
                 "--output", "json")
    doc = json.loads(out)
    assert doc["verdict"] == "meta-metric" and not doc["axioms"]["M1"]
    _, out = run(capsys, "axioms", "--measure", "lower", "--construction")
    assert "M4 counterexample" in out


def test_cluster_command(capsys, tmp_path):
    csv = tmp_path / "d.csv"
    csv.write_text("x,y\n0,0\n0,1\n10,10\n10,11\n")
    out_file = tmp_path / "c.json"
    code, out = run(capsys, "cluster", str(csv), "--k", "2", "--algorithm", "fcm", "-o", str(out_file),
                    "--output", "json")
    assert code == 0 and json.loads(out)["result"]["kind"] == "fuzzy"
    assert json.loads(out_file.read_text())["kind"] == "fuzzy"


def test_bench(capsys):
    code, out = run(capsys, "bench", "--n", "50", "--samples", "100", "--output", "json")
    assert code == 0 and len(json.loads(out)["rows"]) == 2


def test_help_documents_similarity():
    out = subprocess.run([sys.executable, "-m", "softcompare.cli", "compare", "--help"],
                         capture_output=True, text=True).stdout
    assert "1 - distance" in " ".join(out.split())


def test_pcm_sampled_interval_widens_with_inner_samples():
    from softcompare.io import load_iris
    from softcompare.reproduce import IrisConfig, evaluate, fit_all
    data = load_iris()
    pcm = fit_all(IrisConfig(algorithms=("PCM",)), data)["PCM"][0]
    widths = []
    for inner in (1, 8, 64):
        lo, hi = evaluate("PCM", pcm, data.labels, IrisConfig(samples=2000, inner_samples=inner))["S-RI"].value \
            if inner > 1 else (0.0, 0.0)
        widths.append(hi - lo)
    assert widths[0] < widths[1] < widths[2]
