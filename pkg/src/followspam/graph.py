"""Directed follow graph: loading, degree queries and ego-network extraction.

Nodes are stored under dense ids ``0..n-1``. The original dataset ids are kept
in ``DirectedGraph.raw_ids`` (the id table), so ``raw_ids[u]`` is the id that
appeared in the edge list for dense node ``u``.
"""
from __future__ import annotations

import logging
from dataclasses import dataclass
from pathlib import Path

import numpy as np

log = logging.getLogger(__name__)


class GraphError(Exception):
    pass


class EdgeListError(GraphError):
    """Malformed or unreadable edge-list input."""


class NodeNotFoundError(GraphError, KeyError):
    def __str__(self):
        return f"unknown node: {self.args[0]}"


@dataclass(frozen=True)
class LoadReport:
    nodes: int
    edges: int
    self_loops: int
    duplicates: int
    lines: int

    def to_text(self) -> str:
        return "\n".join(
            f"{name} {getattr(self, name)}"
            for name in ("nodes", "edges", "self_loops", "duplicates", "lines")
        )


def _csr(src: np.ndarray, dst: np.ndarray, n: int) -> tuple[np.ndarray, np.ndarray]:
    order = np.lexsort((dst, src))
    ptr = np.zeros(n + 1, dtype=np.int64)
    np.cumsum(np.bincount(src, minlength=n), out=ptr[1:])
    idx = dst[order].astype(np.int64)
    return ptr, idx


def _frozen(a: np.ndarray) -> np.ndarray:
    a.setflags(write=False)
    return a


class DirectedGraph:
    """Immutable simple digraph in compressed sparse row form.

    Both directions are stored: ``successors(u)`` are the users ``u``
    follows, ``predecessors(u)`` are the users following ``u``. Each
    neighbor array is sorted, so ``has_edge`` is a binary search.

    Build instances with :meth:`from_edges` or :func:`load_edge_list`.
    """

    def __init__(self, out_ptr, out_idx, in_ptr, in_idx, raw_ids):
        self.out_ptr = _frozen(np.asarray(out_ptr, dtype=np.int64))
        self.out_idx = _frozen(np.asarray(out_idx, dtype=np.int64))
        self.in_ptr = _frozen(np.asarray(in_ptr, dtype=np.int64))
        self.in_idx = _frozen(np.asarray(in_idx, dtype=np.int64))
        self.raw_ids = _frozen(np.asarray(raw_ids, dtype=np.int64))
        self.report: LoadReport | None = None
        self._index: dict[int, int] | None = None

    @classmethod
    def from_edges(cls, src, dst, n: int | None = None, raw_ids=None) -> "DirectedGraph":
        """Build from dense-id edge arrays.

        Self-loops and duplicate edges are dropped silently; use
        :func:`from_raw_edges` when the counts matter. ``n`` defaults to one
        more than the largest id seen, which allows isolated trailing nodes.
        """
        src = np.asarray(src, dtype=np.int64).ravel()
        dst = np.asarray(dst, dtype=np.int64).ravel()
        if src.shape != dst.shape:
            raise ValueError("src and dst differ in length")
        if n is None:
            n = int(max(src.max(initial=-1), dst.max(initial=-1))) + 1
        if src.size and (min(src.min(), dst.min()) < 0 or max(src.max(), dst.max()) >= n):
            raise ValueError("edge endpoint outside 0..n-1")
        keep = src != dst
        src, dst = src[keep], dst[keep]
        if src.size:
            key = np.unique(src * n + dst)
            src, dst = key // n, key % n
        out_ptr, out_idx = _csr(src, dst, n)
        in_ptr, in_idx = _csr(dst, src, n)
        if raw_ids is None:
            raw_ids = np.arange(n, dtype=np.int64)
        elif len(raw_ids) != n:
            raise ValueError("raw_ids length must equal node count")
        return cls(out_ptr, out_idx, in_ptr, in_idx, raw_ids)

    @property
    def node_count(self) -> int:
        return len(self.raw_ids)

    @property
    def edge_count(self) -> int:
        return len(self.out_idx)

    def __len__(self):
        return self.node_count

    def __repr__(self):
        return f"DirectedGraph(nodes={self.node_count}, edges={self.edge_count})"

    def __eq__(self, other):
        if not isinstance(other, DirectedGraph):
            return NotImplemented
        return all(
            np.array_equal(getattr(self, k), getattr(other, k))
            for k in ("raw_ids", "out_ptr", "out_idx", "in_ptr", "in_idx")
        )

    def check_node(self, u) -> int:
        u = int(u)
        if not 0 <= u < self.node_count:
            raise NodeNotFoundError(u)
        return u

    def index(self, raw_id) -> int:
        """Dense id of the node whose original (dataset) id is ``raw_id``."""
        if self._index is None:
            self._index = {int(r): i for i, r in enumerate(self.raw_ids)}
        try:
            return self._index[int(raw_id)]
        except KeyError:
            raise NodeNotFoundError(raw_id) from None

    def successors(self, u) -> np.ndarray:
        u = self.check_node(u)
        return self.out_idx[self.out_ptr[u]:self.out_ptr[u + 1]]

    def predecessors(self, u) -> np.ndarray:
        u = self.check_node(u)
        return self.in_idx[self.in_ptr[u]:self.in_ptr[u + 1]]

    def neighbors(self, u) -> np.ndarray:
        """Sorted union of followees and followers."""
        return np.union1d(self.successors(u), self.predecessors(u))

    def has_edge(self, a, b) -> bool:
        row = self.successors(a)
        i = np.searchsorted(row, b)
        return bool(i < len(row) and row[i] == b)

    def edges(self) -> tuple[np.ndarray, np.ndarray]:
        src = np.repeat(np.arange(self.node_count, dtype=np.int64), np.diff(self.out_ptr))
        return src, self.out_idx.copy()

    def indegrees(self) -> np.ndarray:
        return np.diff(self.in_ptr)

    def outdegrees(self) -> np.ndarray:
        return np.diff(self.out_ptr)


def from_raw_edges(pairs) -> tuple[DirectedGraph, LoadReport]:
    """Build a graph from ``(follower, followee)`` pairs in original ids.

    Raw ids are remapped to dense ids in sorted order. Returns the graph and
    a report of how many self-loops and duplicates were dropped.
    """
    arr = np.asarray(pairs, dtype=np.int64).reshape(-1, 2)
    raw_ids, dense = np.unique(arr, return_inverse=True)
    dense = dense.reshape(-1, 2)
    n = len(raw_ids)
    loops = dense[:, 0] == dense[:, 1]
    nonloop = dense[~loops]
    unique_edges = len(np.unique(nonloop[:, 0] * n + nonloop[:, 1])) if len(nonloop) else 0
    g = DirectedGraph.from_edges(nonloop[:, 0], nonloop[:, 1], n=n, raw_ids=raw_ids)
    report = LoadReport(
        nodes=n,
        edges=g.edge_count,
        self_loops=int(loops.sum()),
        duplicates=int(len(nonloop) - unique_edges),
        lines=len(arr),
    )
    g.report = report
    return g, report


def load_edge_list(path) -> DirectedGraph:
    """Parse a whitespace-separated ``follower followee`` edge list.

    Blank lines and lines starting with ``#`` are skipped. The load report
    is available as ``graph.report``.
    """
    path = Path(path)
    pairs = []
    try:
        fh = path.open("r", encoding="ascii")
    except OSError as exc:
        raise EdgeListError(f"cannot read {path}: {exc}") from exc
    with fh:
        for lineno, line in enumerate(fh, 1):
            s = line.strip()
            if not s or s.startswith("#"):
                continue
            parts = s.split()
            if len(parts) != 2 or not (parts[0].isdigit() and parts[1].isdigit()):
                raise EdgeListError(f"{path}:{lineno}: expected two non-negative integers, got {s!r}")
            pairs.append((int(parts[0]), int(parts[1])))
    g, report = from_raw_edges(pairs)
    log.info("loaded %s: %s", path, report)
    return g


def write_edge_list(g: DirectedGraph, path) -> None:
    src, dst = g.edges()
    np.savetxt(path, np.column_stack([g.raw_ids[src], g.raw_ids[dst]]), fmt="%d")


def save_graph(g: DirectedGraph, path) -> None:
    """Persist in binary form (numpy ``.npz``); the id table travels with it."""
    with open(path, "wb") as fh:
        np.savez(fh, out_ptr=g.out_ptr, out_idx=g.out_idx, in_ptr=g.in_ptr,
                 in_idx=g.in_idx, raw_ids=g.raw_ids)


def load_graph(path) -> DirectedGraph:
    """Load a graph saved by :func:`save_graph`, or parse a text edge list."""
    path = Path(path)
    if path.suffix == ".npz":
        try:
            with np.load(path) as z:
                return DirectedGraph(z["out_ptr"], z["out_idx"], z["in_ptr"], z["in_idx"], z["raw_ids"])
        except (OSError, KeyError, ValueError) as exc:
            raise GraphError(f"corrupt graph file {path}: {exc}") from exc
    return load_edge_list(path)


@dataclass(frozen=True)
class DegreeTable:
    indegree: np.ndarray
    outdegree: np.ndarray


def degree_table(g: DirectedGraph) -> DegreeTable:
    return DegreeTable(g.indegrees(), g.outdegrees())


def degrees(g: DirectedGraph, u) -> tuple[int, int]:
    """``(indegree, outdegree)`` of dense node ``u``."""
    u = g.check_node(u)
    return int(g.in_ptr[u + 1] - g.in_ptr[u]), int(g.out_ptr[u + 1] - g.out_ptr[u])


@dataclass(frozen=True)
class EgoNetwork:
    """Induced subgraph on a user and its 1-hop neighbors.

    ``graph`` uses local ids; ``node_map[local]`` is the dense id in the
    parent graph and ``center`` is the local id of the ego user.
    """

    center: int
    graph: DirectedGraph
    node_map: np.ndarray
    capped: bool = False


def induced_subgraph(g: DirectedGraph, members) -> DirectedGraph:
    """Subgraph on sorted dense ids ``members`` with every edge among them.

    The result's ``raw_ids`` are the parent's dense ids.
    """
    members = np.asarray(members, dtype=np.int64)
    starts = g.out_ptr[members]
    lengths = g.out_ptr[members + 1] - starts
    total = int(lengths.sum())
    # flat positions of every out-edge of every member
    offsets = np.repeat(starts - np.concatenate(([0], np.cumsum(lengths)[:-1])), lengths)
    pos = np.arange(total, dtype=np.int64) + offsets
    src = np.repeat(np.arange(len(members), dtype=np.int64), lengths)
    dst_global = g.out_idx[pos]
    loc = np.searchsorted(members, dst_global)
    loc_clipped = np.minimum(loc, len(members) - 1)
    keep = members[loc_clipped] == dst_global
    return DirectedGraph.from_edges(src[keep], loc[keep], n=len(members), raw_ids=members)


def ego_network(g: DirectedGraph, u, cap: int | None = None, seed=None) -> EgoNetwork:
    """Ego network of ``u``: ``u``, its followees and followers, and all
    edges among them.

    With ``cap`` set and more than ``cap`` neighbors, ``cap`` of them are
    sampled uniformly without replacement (``seed`` drives the sampler).
    """
    u = g.check_node(u)
    nbrs = g.neighbors(u)
    capped = False
    if cap is not None and len(nbrs) > cap:
        rng = np.random.default_rng(seed)
        nbrs = np.sort(rng.choice(nbrs, size=cap, replace=False))
        capped = True
    members = np.union1d(nbrs, [u])
    sub = induced_subgraph(g, members)
    center = int(np.searchsorted(members, u))
    return EgoNetwork(center=center, graph=sub, node_map=sub.raw_ids, capped=capped)
