import numpy as np
import pytest

from followspam.features import (MODES, FeatureFileError, FeatureSchema, FeatureSet, extract_features,
                                 sample_baseline, user_features)
from followspam.synth import SynthConfig, generate


@pytest.fixture(scope="module")
def small():
    g, labels = generate(SynthConfig(n_legit=120, n_spam=40, seed=2))
    b = sample_baseline(g, labels, sample=50, seed=1)
    return g, labels, b


def test_schema_widths():
    widths = {m: len(FeatureSchema.for_mode(m).columns) for m in MODES}
    assert widths == {"degree-only": 2, "tsp": 13, "tsp+deg": 15, "ss": 3, "ss+deg": 5, "cascaded": 18}
    c = FeatureSchema.for_mode("cascaded").columns
    assert c[0] == "021D" and c[13:] == ("status", "followee_status", "plp", "indegree", "outdegree")
    with pytest.raises(ValueError):
        FeatureSchema.for_mode("everything")


def test_baseline_sample_size(small):
    _, _, b = small
    assert b.sample_size == 50


@pytest.mark.parametrize("mode", list(MODES))
def test_modes_are_projections_of_cascaded(small, mode):
    g, labels, b = small
    full = extract_features(g, labels, "cascaded", b)
    part = extract_features(g, labels, mode, b)
    np.testing.assert_array_equal(full.select(mode).X, part.X)
    assert np.array_equal(part.y, [labels[u] == "spam" for u in sorted(labels)])


def test_feature_file_round_trip(small, tmp_path):
    g, labels, b = small
    fs = extract_features(g, labels, "cascaded", b)
    fs.save(tmp_path / "f.csv")
    back = FeatureSet.load(tmp_path / "f.csv")
    assert back.schema == fs.schema and back.normalization == fs.normalization
    assert np.array_equal(back.X, fs.X) and np.array_equal(back.users, fs.users)
    assert back.to_text() == fs.to_text()
    header = (tmp_path / "f.csv").read_text().splitlines()
    assert header[1] == "# mode cascaded"
    assert header[3].startswith("user,021D,") and header[3].endswith(",outdegree,label")


def test_followee_status_is_batch_normalized(small):
    g, labels, b = small
    fs = extract_features(g, labels, "ss", b)
    col = fs.X[:, 1]
    assert col.min() == 0.0 and col.max() == 1.0
    lo, hi = fs.normalization["followee_status"]
    assert lo < hi


def test_single_user_row_matches_batch(small):
    g, labels, b = small
    fs = extract_features(g, labels, "cascaded", b)
    for i in (0, 57, 150):
        row = user_features(g, int(fs.users[i]), "cascaded", b, fs.normalization)
        np.testing.assert_array_equal(row, fs.X[i])
    with pytest.raises(ValueError):
        user_features(g, 0, "ss", b, {})


def test_tsp_mode_requires_baseline(small):
    g, labels, _ = small
    with pytest.raises(ValueError):
        extract_features(g, labels, "tsp")


def test_workers_do_not_change_results(small):
    g, labels, b = small
    a = extract_features(g, labels, "tsp", b, workers=1)
    c = extract_features(g, labels, "tsp", b, workers=3)
    np.testing.assert_array_equal(a.X, c.X)


def test_capped_extraction_is_seeded(small):
    g, labels, _ = small
    b = sample_baseline(g, labels, cap=20, seed=3)
    a = extract_features(g, labels, "tsp", b, cap=20, seed=3)
    c = extract_features(g, labels, "tsp", b, cap=20, seed=3)
    assert np.array_equal(a.X, c.X)
    assert a.normalization == {"ego_cap": 20, "ego_seed": 3}
    assert b.cap == 20


@pytest.mark.parametrize("text,match", [
    ("user,a,label\n", "mode"),
    ("# mode tsp\nuser,a,label\n", "header"),
    ("# mode degree-only\nuser,indegree,outdegree,label\n1,2,3\n", "fields"),
    ("# mode degree-only\nuser,indegree,outdegree,label\n1,2,x,spam\n", ":3:"),
    ("# mode degree-only\nuser,indegree,outdegree,label\n1,2,3,ham\n", "label"),
    ("# mode degree-only\nuser,indegree,outdegree,label\n1,2,nan,spam\n", "non-finite"),
])
def test_malformed_feature_files(text, match):
    with pytest.raises(FeatureFileError, match=match):
        FeatureSet.from_text(text)
