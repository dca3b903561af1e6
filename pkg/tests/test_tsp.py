import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from followspam.graph import DirectedGraph
from followspam.triads import TriadCensus, census
from followspam.tsp import (STD_FLOOR, BaselineError, TriadBaseline, compute_baseline, ego_census,
                            normalize_tsp, tsp_features, zscores)

from conftest import ego_example


def make_census(feature_counts):
    counts = np.zeros(16, dtype=np.int64)
    counts[3:] = feature_counts
    return TriadCensus(counts, 0)


def baseline(mean, std):
    return TriadBaseline(np.asarray(mean, float), np.asarray(std, float), sample_size=10)


def test_identical_censuses_clamp_std():
    c = make_census(np.arange(13))
    b = compute_baseline([c, c])
    assert np.array_equal(b.mean, np.arange(13))
    assert np.all(b.std == STD_FLOOR)


def test_population_std_by_hand():
    a, b = np.zeros(13), np.zeros(13)
    a[0], b[0] = 2, 4
    base = compute_baseline([make_census(a), make_census(b)])
    assert base.mean[0] == 3 and base.std[0] == 1


def welford(rows):
    n, mean, m2 = 0, np.zeros(rows.shape[1]), np.zeros(rows.shape[1])
    for x in rows:
        n += 1
        d = x - mean
        mean += d / n
        m2 += d * (x - mean)
    return mean, np.sqrt(m2 / n)


def test_baseline_matches_streaming_oracle(synthetic_run):
    run = synthetic_run(0)
    legit = [run.graph.index(r) for r, lab in run.labels.items() if lab == "legit"]
    rows = np.array([ego_census(run.graph, u).feature_counts() for u in legit], dtype=float)
    mean, std = welford(rows)
    assert run.baseline.sample_size == 1000
    np.testing.assert_allclose(run.baseline.mean, mean, rtol=1e-9)
    np.testing.assert_allclose(run.baseline.std, np.maximum(std, STD_FLOOR), rtol=1e-9)


def test_baseline_shift():
    rng = np.random.default_rng(0)
    rows = rng.integers(0, 50, size=(20, 13))
    b1 = compute_baseline([make_census(r) for r in rows])
    b2 = compute_baseline([make_census(r + 7) for r in rows])
    np.testing.assert_allclose(b2.mean, b1.mean + 7)
    np.testing.assert_allclose(b2.std, b1.std, rtol=1e-12)


def test_zscores():
    mean, std = np.arange(13.0), np.full(13, 2.0)
    b = baseline(mean, std)
    assert np.all(zscores(make_census(mean), b) == 0)
    assert np.allclose(zscores(mean + std, b), 1)
    rng = np.random.default_rng(3)
    counts = rng.integers(0, 30, 13)
    z = zscores(make_census(counts), b)
    assert all(z[i] == (counts[i] - mean[i]) / std[i] for i in range(13))


def test_normalize_examples():
    z = np.zeros(13)
    z[:2] = 3, 4
    t = normalize_tsp(z)
    assert t[0] == pytest.approx(0.6) and t[1] == pytest.approx(0.8)
    assert np.all(normalize_tsp(np.zeros(13)) == 0)


@settings(max_examples=200, deadline=None)
@given(st.lists(st.floats(-1e6, 1e6), min_size=13, max_size=13), st.floats(1e-3, 1e3))
def test_normalize_properties(z, scale):
    z = np.array(z)
    t = normalize_tsp(z)
    if np.any(z != 0):
        assert abs(np.linalg.norm(t) - 1) < 1e-12
        np.testing.assert_allclose(normalize_tsp(z * scale), t, atol=1e-12)
    else:
        assert np.all(t == 0)


def test_isolated_user():
    g = DirectedGraph.from_edges([0], [1], n=3)
    b = baseline(np.full(13, 2.0), np.full(13, 0.5))
    t = tsp_features(g, 2, b)
    np.testing.assert_allclose(t, normalize_tsp(-b.mean / b.std))


def test_pipeline_equals_manual_composition():
    g = ego_example()
    b = baseline(np.linspace(0, 3, 13), np.linspace(1, 2, 13))
    manual = normalize_tsp(zscores(census(g), b))
    np.testing.assert_array_equal(tsp_features(g, 0, b), manual)
    with_deg = tsp_features(g, 0, b, include_degrees=True)
    assert list(with_deg[13:]) == [3, 3]


def test_baseline_file_round_trip(tmp_path):
    rng = np.random.default_rng(5)
    b = TriadBaseline(rng.random(13) * 100, rng.random(13) + STD_FLOOR, sample_size=321, cap=50)
    b.save(tmp_path / "b.txt")
    text = (tmp_path / "b.txt").read_text()
    assert "population" in text and "cap 50" in text
    back = TriadBaseline.load(tmp_path / "b.txt")
    assert np.array_equal(back.mean, b.mean) and np.array_equal(back.std, b.std)
    assert (back.sample_size, back.cap) == (321, 50)


def test_baseline_validation(tmp_path):
    with pytest.raises(BaselineError):
        TriadBaseline(np.zeros(12), np.ones(12), 5)
    with pytest.raises(BaselineError):
        TriadBaseline(np.zeros(13), -np.ones(13), 5)
    with pytest.raises(BaselineError):
        compute_baseline([make_census(np.zeros(13))])
    (tmp_path / "bad.txt").write_text("sample_size 3\n021D 1 1\n")
    with pytest.raises(BaselineError):
        TriadBaseline.load(tmp_path / "bad.txt")
