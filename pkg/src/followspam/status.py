"""Social-status features.

A user's status is indegree over outdegree. Following a higher-status user
is a positive link; following an equal or lower one is negative.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .graph import DegreeTable, DirectedGraph, degree_table


@dataclass(frozen=True)
class StatusTable:
    status: np.ndarray

    def __getitem__(self, u) -> float:
        return float(self.status[u])

    def __len__(self):
        return len(self.status)


def build_status_table(degrees: DegreeTable | DirectedGraph) -> StatusTable:
    """``indegree / outdegree`` per node; outdegree 0 is treated as 1."""
    if isinstance(degrees, DirectedGraph):
        degrees = degree_table(degrees)
    indeg = np.asarray(degrees.indegree, dtype=np.float64)
    outdeg = np.maximum(np.asarray(degrees.outdegree), 1)
    return StatusTable(indeg / outdeg)


def plp(g: DirectedGraph, st: StatusTable, u) -> tuple[float, bool]:
    """Positive link probability of ``u`` over its followees.

    Returns ``(probability, has_followees)``; a user who follows nobody
    gets ``(0.0, False)``.
    """
    followees = g.successors(u)
    if len(followees) == 0:
        return 0.0, False
    positive = np.count_nonzero(st.status[followees] > st.status[u])
    return positive / len(followees), True


def avg_followee_status(g: DirectedGraph, st: StatusTable, u) -> tuple[float, bool]:
    """Mean status of ``u``'s followees, as ``(value, has_followees)``."""
    followees = g.successors(u)
    if len(followees) == 0:
        return 0.0, False
    return float(st.status[followees].mean()), True


@dataclass(frozen=True)
class MinMaxScale:
    """Min-max scale fitted on one extraction batch and reused for scoring."""
    lo: float
    hi: float

    @classmethod
    def fit(cls, values) -> "MinMaxScale":
        values = np.asarray(values, dtype=np.float64)
        if values.size == 0:
            raise ValueError("cannot normalize an empty batch")
        return cls(float(values.min()), float(values.max()))

    def apply(self, values, clip: bool = False) -> np.ndarray:
        values = np.asarray(values, dtype=np.float64)
        if self.hi == self.lo:
            return np.zeros_like(values)
        out = (values - self.lo) / (self.hi - self.lo)
        return np.clip(out, 0.0, 1.0) if clip else out


def normalize_batch(values) -> np.ndarray:
    """Min-max scale to [0, 1]; an all-equal batch maps to zeros."""
    return MinMaxScale.fit(values).apply(values)


SS_COLUMNS = ("status", "followee_status", "plp")


def ss_features(g: DirectedGraph, st: StatusTable, users, include_degrees: bool = False,
                scale: MinMaxScale | None = None) -> tuple[np.ndarray, MinMaxScale]:
    """Status feature rows for a batch of users.

    Columns are ``status, followee_status, plp`` (plus indegree and
    outdegree when asked). The followee-status column is min-max normalized
    over the batch, or with ``scale`` when one is given (scoring against a
    training batch, in which case values are clipped to [0, 1]). Returns the
    rows and the scale that was applied.
    """
    users = np.asarray(users, dtype=np.int64).ravel()
    raw = np.empty((len(users), 3))
    for i, u in enumerate(users):
        raw[i, 0] = st.status[g.check_node(u)]
        raw[i, 1] = avg_followee_status(g, st, u)[0]
        raw[i, 2] = plp(g, st, u)[0]
    if scale is None:
        scale = MinMaxScale.fit(raw[:, 1])
        raw[:, 1] = scale.apply(raw[:, 1])
    else:
        raw[:, 1] = scale.apply(raw[:, 1], clip=True)
    if include_degrees:
        raw = np.column_stack([raw, g.indegrees()[users], g.outdegrees()[users]])
    return raw, scale
