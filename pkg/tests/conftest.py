import numpy as np
import pytest

from followspam.features import extract_features, sample_baseline
from followspam.graph import DirectedGraph
from followspam.synth import SynthConfig, generate


def random_digraph(n, p, seed):
    rng = np.random.default_rng(seed)
    adj = rng.random((n, n)) < p
    np.fill_diagonal(adj, False)
    src, dst = np.nonzero(adj)
    return DirectedGraph.from_edges(src, dst, n=n)


def ego_example():
    """Center 0 follows 1, 2, 3 and is followed by 4, 5, 6; four more edges
    among the neighbors make 7 nodes and 10 edges."""
    edges = [(0, 1), (0, 2), (0, 3), (4, 0), (5, 0), (6, 0), (1, 2), (4, 5), (3, 6), (6, 1)]
    src, dst = zip(*edges)
    return DirectedGraph.from_edges(src, dst, n=7)


class SyntheticRun:
    """Default synthetic dataset plus its cascaded features, built lazily."""

    def __init__(self, seed):
        self.seed = seed
        self.graph, self.labels = generate(SynthConfig(seed=seed))
        self.baseline = sample_baseline(self.graph, self.labels, seed=seed)
        self.features = extract_features(self.graph, self.labels, "cascaded", self.baseline)


_RUNS = {}


@pytest.fixture(scope="session")
def synthetic_run():
    def get(seed=0):
        if seed not in _RUNS:
            _RUNS[seed] = SyntheticRun(seed)
        return _RUNS[seed]
    return get
