"""
Counting triads in a small ego network
======================================

A triad census sorts every unordered triple of nodes into one of 16
isomorphism classes of three-node directed graphs. This script builds a
seven-node ego network by hand, runs the fast census and the brute-force
reference, and shows that both agree.
"""

# %%
# A hand-built follow graph
# -------------------------
# Node 0 is the ego. It follows 1, 2 and 3 and is followed by 4, 5 and 6.
# A few arcs among the neighbors give the census something to find.
import numpy as np

from followspam import DirectedGraph, census, census_bruteforce, ego_network
from followspam.triads import TRIAD_LABELS

edges = [(0, 1), (0, 2), (0, 3), (4, 0), (5, 0), (6, 0),
         (1, 2), (4, 5), (3, 6), (6, 1)]
src, dst = np.array(edges).T
g = DirectedGraph.from_edges(src, dst, n=7)
print(g)

# %%
# The ego network is the induced subgraph on the user and its neighbors.
# Here it covers the whole graph.
ego = ego_network(g, 0)
print("ego nodes:", ego.graph.node_count, "arcs:", ego.graph.edge_count)

# %%
# Census
# ------
# Seven nodes give C(7, 3) = 35 triples in total.
fast = census(ego.graph)
slow = census_bruteforce(ego.graph)
for label in TRIAD_LABELS:
    print(f"{label:>5} {fast[label]:3d}")
print("total", fast.total, "agrees with brute force:", fast == slow)

# %%
# The 13 classes with at least two connected nodes feed the classifier.
# The empty (003) and single-arc (012, 102) classes are left out.
print(dict(zip(TRIAD_LABELS[3:], fast.feature_counts().tolist())))
