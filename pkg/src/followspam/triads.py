"""Directed triad census.

The 16 isomorphism classes of directed triads are labelled with MAN codes
(number of Mutual, Asymmetric and Null dyads, plus an orientation letter).
A triple ``(a, b, c)`` is encoded as a 6-bit *tricode*, one bit per possible
arc, in the order ``a->b, b->a, a->c, c->a, b->c, c->b``. The 64-entry lookup
from tricode to class is generated at import time from one exemplar triad per
class and checked for totality and permutation consistency.

:func:`census` is the subquadratic Batagelj-Mrvar algorithm: it only visits
triples containing at least one connected dyad and fills the empty class by
complement, so its cost is driven by edges and degrees rather than ``n**3``.
"""
from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations, permutations
from math import comb

import numba
import numpy as np

from .graph import DirectedGraph

TRIAD_LABELS = (
    "003", "012", "102", "021D", "021U", "021C", "111D", "111U",
    "030T", "030C", "201", "120D", "120U", "120C", "210", "300",
)
# classes without an isolated node; the ones used as features
FEATURE_LABELS = TRIAD_LABELS[3:]
FEATURE_SLICE = slice(3, 16)

# Arc order of the tricode bits, as (tail, head) positions in the triple.
ARC_ORDER = ((0, 1), (1, 0), (0, 2), (2, 0), (1, 2), (2, 1))

# One hand-encoded triad per class on nodes 0, 1, 2.
EXEMPLARS = {
    "003": [],
    "012": [(0, 1)],
    "102": [(0, 1), (1, 0)],
    "021D": [(0, 1), (0, 2)],  # out-star: one user follows two
    "021U": [(1, 0), (2, 0)],  # in-star
    "021C": [(0, 1), (1, 2)],
    "111D": [(0, 1), (1, 0), (2, 0)],
    "111U": [(0, 1), (1, 0), (0, 2)],
    "030T": [(0, 1), (1, 2), (0, 2)],
    "030C": [(0, 1), (1, 2), (2, 0)],
    "201": [(0, 1), (1, 0), (0, 2), (2, 0)],
    "120D": [(2, 0), (2, 1), (0, 1), (1, 0)],
    "120U": [(0, 2), (1, 2), (0, 1), (1, 0)],
    "120C": [(0, 1), (1, 2), (0, 2), (2, 0)],
    "210": [(0, 1), (1, 0), (1, 2), (2, 1), (0, 2)],
    "300": [(0, 1), (1, 0), (0, 2), (2, 0), (1, 2), (2, 1)],
}


def _code_from_arcs(arcs) -> int:
    arcs = set(arcs)
    return sum(1 << bit for bit, arc in enumerate(ARC_ORDER) if arc in arcs)


def _arcs_from_code(code: int):
    return [arc for bit, arc in enumerate(ARC_ORDER) if code >> bit & 1]


def _permuted_code(code: int, perm) -> int:
    return _code_from_arcs((perm[a], perm[b]) for a, b in _arcs_from_code(code))


def _canonical(code: int) -> int:
    return min(_permuted_code(code, p) for p in permutations(range(3)))


def _man_counts(code: int) -> tuple[int, int, int]:
    m = a = 0
    for bit in (0, 2, 4):  # each dyad occupies a pair of adjacent bits
        pair = code >> bit & 3
        if pair == 3:
            m += 1
        elif pair:
            a += 1
    return m, a, 3 - m - a


class TricodeTableError(RuntimeError):
    pass


def build_tricode_table() -> np.ndarray:
    """Return the 64-entry array mapping tricode to class index (0-based).

    Every code is canonicalised by its minimal code over the six vertex
    permutations and matched against the canonical code of each exemplar.
    Raises :class:`TricodeTableError` if the exemplars fail to partition the
    64 codes or disagree with their own MAN label.
    """
    by_canon = {}
    for idx, label in enumerate(TRIAD_LABELS):
        code = _code_from_arcs(EXEMPLARS[label])
        if "".join(map(str, _man_counts(code))) != label[:3]:
            raise TricodeTableError(f"exemplar for {label} has wrong dyad counts")
        canon = _canonical(code)
        if canon in by_canon:
            raise TricodeTableError(f"exemplars {TRIAD_LABELS[by_canon[canon]]} and {label} are isomorphic")
        by_canon[canon] = idx

    table = np.full(64, -1, dtype=np.int64)
    for code in range(64):
        try:
            table[code] = by_canon[_canonical(code)]
        except KeyError:
            raise TricodeTableError(f"tricode {code} matches no exemplar") from None

    for code in range(64):
        for p in permutations(range(3)):
            if table[_permuted_code(code, p)] != table[code]:
                raise TricodeTableError(f"tricode {code} not permutation invariant")
    return table


TRICODE_TABLE = build_tricode_table()
TRICODE_TABLE.setflags(write=False)


def tricode(g: DirectedGraph, a, b, c) -> int:
    if len({int(a), int(b), int(c)}) != 3:
        raise ValueError("tricode needs three distinct nodes")
    triple = (a, b, c)
    return sum(1 << bit for bit, (x, y) in enumerate(ARC_ORDER) if g.has_edge(triple[x], triple[y]))


def triad_class(code: int) -> str:
    return TRIAD_LABELS[TRICODE_TABLE[code]]


@dataclass(frozen=True)
class TriadCensus:
    counts: np.ndarray  # int64, length 16, ordered as TRIAD_LABELS
    n: int

    def __getitem__(self, label: str) -> int:
        return int(self.counts[TRIAD_LABELS.index(label)])

    def as_dict(self) -> dict[str, int]:
        return dict(zip(TRIAD_LABELS, map(int, self.counts)))

    def feature_counts(self) -> np.ndarray:
        """Counts of the 13 connected classes (no isolated node)."""
        return self.counts[FEATURE_SLICE]

    @property
    def total(self) -> int:
        return int(self.counts.sum())

    def __eq__(self, other):
        return (isinstance(other, TriadCensus) and self.n == other.n
                and np.array_equal(self.counts, other.counts))


def _undirected_csr(g: DirectedGraph):
    """Sorted undirected neighbor lists plus a 2-bit arc flag per entry
    (bit 0: node -> neighbor, bit 1: neighbor -> node)."""
    n = g.node_count
    src, dst = g.edges()
    a = np.concatenate([src, dst])
    b = np.concatenate([dst, src])
    flag = np.concatenate([np.ones_like(src), np.full_like(src, 2)])
    if a.size == 0:
        return np.zeros(n + 1, dtype=np.int64), a, flag
    key = a * n + b
    order = np.argsort(key, kind="stable")
    key, flag = key[order], flag[order]
    uniq, start = np.unique(key, return_index=True)
    flags = np.bitwise_or.reduceat(flag, start)
    ua, ub = uniq // n, uniq % n
    ptr = np.zeros(n + 1, dtype=np.int64)
    np.cumsum(np.bincount(ua, minlength=n), out=ptr[1:])
    return ptr, ub.astype(np.int64), flags.astype(np.int64)


@numba.njit(cache=True, nogil=True)
def _census_kernel(n, ptr, nbr, flg, table):
    counts = np.zeros(16, dtype=np.int64)
    for v in range(n):
        for k in range(ptr[v], ptr[v + 1]):
            u = nbr[k]
            if u <= v:
                continue
            vu = flg[k]  # bit 0: v->u, bit 1: u->v
            # merge the sorted neighbor lists of v and u
            i, iend = ptr[v], ptr[v + 1]
            j, jend = ptr[u], ptr[u + 1]
            s = 0
            while i < iend or j < jend:
                if j >= jend or (i < iend and nbr[i] < nbr[j]):
                    w = nbr[i]
                    fv = flg[i]
                    fu = 0
                    i += 1
                elif i >= iend or nbr[j] < nbr[i]:
                    w = nbr[j]
                    fv = 0
                    fu = flg[j]
                    j += 1
                else:
                    w = nbr[i]
                    fv = flg[i]
                    fu = flg[j]
                    i += 1
                    j += 1
                if w == u or w == v:
                    continue
                s += 1
                # count each connected triple once: at its smallest connected dyad
                if u < w or (v < w and w < u and fv == 0):
                    code = vu | (fv << 2) | (fu << 4)
                    counts[table[code]] += 1
            dyadic = 2 if vu == 3 else 1
            counts[dyadic] += n - s - 2
    return counts


def census(g: DirectedGraph) -> TriadCensus:
    """Count all 16 triad classes of ``g``."""
    n = g.node_count
    ptr, nbr, flg = _undirected_csr(g)
    counts = _census_kernel(n, ptr, nbr, flg, TRICODE_TABLE)
    counts[0] = comb(n, 3) - counts[1:].sum()
    return TriadCensus(counts, n)


BRUTEFORCE_MAX_NODES = 200


def census_bruteforce(g: DirectedGraph) -> TriadCensus:
    """Classify every one of the C(n, 3) triples directly. Test oracle."""
    n = g.node_count
    if n > BRUTEFORCE_MAX_NODES:
        raise ValueError(f"brute-force census limited to {BRUTEFORCE_MAX_NODES} nodes, got {n}")
    adj = np.zeros((n, n), dtype=np.int64)
    src, dst = g.edges()
    adj[src, dst] = 1
    counts = np.zeros(16, dtype=np.int64)
    if n >= 3:
        t = np.array(list(combinations(range(n), 3)), dtype=np.int64)
        codes = np.zeros(len(t), dtype=np.int64)
        for bit, (x, y) in enumerate(ARC_ORDER):
            codes |= adj[t[:, x], t[:, y]] << bit
        counts += np.bincount(TRICODE_TABLE[codes], minlength=16)
    return TriadCensus(counts, n)
