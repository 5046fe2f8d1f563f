import json

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import random_fuzzy, random_mass_clustering
from softcompare.errors import MassSumViolation, NonNumericFeature, ParseError, SchemaError, ValidationError
from softcompare.io import EvaluationReport, load_dataset, load_iris, read_clustering, write_clustering
from softcompare.model import SCKind, SoftClustering, classify


def test_load_small_csv(tmp_path):
    p = tmp_path / "d.csv"
    p.write_text("x,y,label\n1,2,a\n3,4,b\n5,6,a\n")
    ds = load_dataset(p, label_col="label")
    assert (ds.n, ds.p) == (3, 2)
    assert ds.labels.canonical() == (0, 1, 0)
    assert ds.feature_names == ("x", "y")


def test_non_numeric_cell(tmp_path):
    p = tmp_path / "d.csv"
    p.write_text("x,y\n1,2\n3,oops\n")
    with pytest.raises(NonNumericFeature) as info:
        load_dataset(p)
    assert info.value.row == 3 and info.value.column == "y"
    assert "oops" in str(info.value)


def test_ragged_and_missing_label(tmp_path):
    p = tmp_path / "d.csv"
    p.write_text("x,y\n1\n")
    with pytest.raises(ParseError):
        load_dataset(p)
    p.write_text("x,y\n1,2\n")
    with pytest.raises(ParseError):
        load_dataset(p, label_col="class")


def test_bundled_iris():
    ds = load_iris()
    assert (ds.n, ds.p) == (150, 4)
    counts = np.bincount(ds.labels.array)
    assert counts.tolist() == [50, 50, 50]


def test_round_trip_fixture(tmp_path, fixture_e):
    p = tmp_path / "e.json"
    write_clustering(fixture_e, p)
    assert read_clustering(p) == fixture_e


def test_hard_in_rough_syntax(tmp_path):
    p = tmp_path / "h.json"
    p.write_text(json.dumps({"format": "softcompare.clustering", "version": 1, "kind": "rough",
                             "frame": ["w1", "w2"], "objects": [["w1"], ["w1"], ["w2"]]}))
    assert classify(read_clustering(p)) is SCKind.HARD


def test_bad_files(tmp_path):
    p = tmp_path / "bad.json"
    p.write_text(json.dumps({"format": "softcompare.clustering", "version": 1, "kind": "evidential",
                             "frame": ["w1", "w2"], "objects": [{"focal": [{"set": ["w1"], "mass": 0.9}]}]}))
    with pytest.raises(MassSumViolation):
        read_clustering(p)
    assert issubclass(MassSumViolation, ValidationError)
    p.write_text(json.dumps({"format": "softcompare.clustering", "version": 2, "kind": "hard",
                             "frame": ["w1"], "objects": ["w1"]}))
    with pytest.raises(SchemaError):
        read_clustering(p)
    p.write_text("{not json")
    with pytest.raises(SchemaError):
        read_clustering(p)
    p.write_text(json.dumps({"format": "softcompare.clustering", "version": 1, "kind": "blurry",
                             "frame": ["w1"], "objects": ["w1"]}))
    with pytest.raises(SchemaError):
        read_clustering(p)


def test_membership_vectors(tmp_path):
    p = tmp_path / "f.json"
    p.write_text(json.dumps({"format": "softcompare.clustering", "version": 1, "kind": "possibilistic",
                             "frame": ["w1", "w2"], "objects": [[1.0, 0.5], [0.0, 1.0]]}))
    m = read_clustering(p)
    assert m.masses[0].focal == ((0b01, 0.5), (0b11, 0.5))


def test_report_serialization():
    rep = EvaluationReport("rand", "rand", "exact", {"distance": 0.25}, {"tnorm": "min"}, None,
                           [{"path": "a.json", "sha256": "0" * 64}], {"hard_pairs": 1}, 0.12345)
    d = json.loads(rep.to_json())
    assert d["seconds"] == 0.123
    assert "seconds" not in rep.payload()
    assert "0.2500" in rep.to_table()


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 2**32 - 1), st.booleans())
def test_round_trip_is_exact(seed, fuzzy):
    import tempfile
    from pathlib import Path
    rng = np.random.default_rng(seed)
    n, k = int(rng.integers(1, 6)), int(rng.integers(1, 4))
    m = random_fuzzy(rng, n, k) if fuzzy else random_mass_clustering(rng, n, k, max_focal=3)
    with tempfile.TemporaryDirectory() as d:
        p = Path(d) / "m.json"
        write_clustering(m, p)
        back = read_clustering(p)
    assert isinstance(back, SoftClustering)
    assert back.frame == m.frame
    for a, b in zip(m.masses, back.masses):
        assert [x for x, _ in a] == [x for x, _ in b]
        assert max(abs(u - v) for (_, u), (_, v) in zip(a, b)) <= 1e-12
