from itertools import permutations
from math import comb

import networkx as nx
import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from followspam.graph import DirectedGraph
from followspam.triads import (ARC_ORDER, EXEMPLARS, FEATURE_LABELS, TRIAD_LABELS, TRICODE_TABLE, census,
                               census_bruteforce, triad_class, tricode)

from conftest import ego_example, random_digraph


def test_feature_labels_exclude_disconnected_classes():
    assert len(FEATURE_LABELS) == 13
    assert set(TRIAD_LABELS) - set(FEATURE_LABELS) == {"003", "012", "102"}


def test_tricode_basics():
    empty = DirectedGraph.from_edges([], [], n=3)
    assert tricode(empty, 0, 1, 2) == 0
    full = DirectedGraph.from_edges(*zip(*[(a, b) for a in range(3) for b in range(3) if a != b]))
    assert tricode(full, 0, 1, 2) == 63
    star = DirectedGraph.from_edges([0, 0], [1, 2])
    code = tricode(star, 0, 1, 2)
    assert code == 0b000101  # bits for a->b and a->c
    assert triad_class(code) == "021D"
    with pytest.raises(ValueError):
        tricode(star, 0, 0, 1)


def test_table_endpoints():
    assert triad_class(0) == "003"
    assert triad_class(63) == "300"


def test_exemplars_map_to_own_class():
    for label, arcs in EXEMPLARS.items():
        code = sum(1 << bit for bit, arc in enumerate(ARC_ORDER) if arc in arcs)
        assert triad_class(code) == label


def test_table_matches_networkx_tricodes():
    # networkx lists the class of each tricode under the same arc order
    from networkx.algorithms.triads import TRICODE_TO_NAME, TRICODES
    assert [TRIAD_LABELS[i] for i in TRICODE_TABLE] == [TRICODE_TO_NAME[i] for i in range(64)]
    assert len(TRICODES) == 64


def test_table_is_permutation_invariant():
    for a, b, c in permutations(range(3)):
        for code in range(64):
            arcs = [ARC_ORDER[bit] for bit in range(6) if code >> bit & 1]
            g = DirectedGraph.from_edges([x for x, _ in arcs], [y for _, y in arcs], n=3)
            assert triad_class(tricode(g, a, b, c)) == triad_class(code)


def test_small_censuses():
    c = census(DirectedGraph.from_edges([0, 0], [1, 2]))
    assert c["021D"] == 1 and c.total == 1
    full = DirectedGraph.from_edges(*zip(*[(a, b) for a in range(3) for b in range(3) if a != b]))
    assert census(full)["300"] == 1
    assert census_bruteforce(DirectedGraph.from_edges([], [], n=4))["003"] == 4
    c = census_bruteforce(DirectedGraph.from_edges([0, 1], [1, 0], n=3))
    assert c["102"] == 1 and c.total == 1


def test_ego_example_census():
    ego = ego_example()
    c = census(ego)
    assert c.total == 35
    assert c == census_bruteforce(ego)


def test_degenerate_sizes():
    for n in (0, 1, 2):
        c = census(DirectedGraph.from_edges([], [], n=n))
        assert c.total == 0
    assert census(DirectedGraph.from_edges([0], [1])).total == 0


@pytest.mark.parametrize("seed", range(12))
def test_census_matches_networkx(seed):
    g = random_digraph(25 + seed, [0.05, 0.2, 0.5][seed % 3], seed)
    ng = nx.DiGraph()
    ng.add_nodes_from(range(g.node_count))
    ng.add_edges_from(zip(*g.edges()))
    assert census(g).as_dict() == nx.triadic_census(ng)


def test_bruteforce_oracle_random():
    g = random_digraph(50, 0.2, 11)
    assert census(g) == census_bruteforce(g)


def test_bruteforce_guard():
    with pytest.raises(ValueError):
        census_bruteforce(DirectedGraph.from_edges([], [], n=201))


@settings(max_examples=40, deadline=None)
@given(st.integers(3, 14), st.data())
def test_relabelling_leaves_census_unchanged(n, data):
    edges = data.draw(st.sets(st.tuples(st.integers(0, n - 1), st.integers(0, n - 1)), max_size=40))
    edges = [(a, b) for a, b in edges if a != b]
    perm = data.draw(st.permutations(range(n)))
    src = [a for a, _ in edges]
    dst = [b for _, b in edges]
    g = DirectedGraph.from_edges(src, dst, n=n)
    h = DirectedGraph.from_edges([perm[a] for a in src], [perm[b] for b in dst], n=n)
    assert census(g) == census(h)
    assert census(g).total == comb(n, 3)


def test_adding_an_arc_only_touches_its_triples():
    g = random_digraph(12, 0.2, 4)
    src, dst = g.edges()
    a, b = next((a, b) for a in range(12) for b in range(12)
                if a != b and not g.has_edge(a, b))
    h = DirectedGraph.from_edges(np.r_[src, a], np.r_[dst, b], n=12)
    before, after = census(g).counts, census(h).counts
    assert (after - before).sum() == 0
    # only the n-2 triples containing both endpoints can move
    assert np.abs(after - before).sum() <= 2 * 10
