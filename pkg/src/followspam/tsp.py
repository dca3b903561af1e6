"""Triad significance profiles.

A user's ego-network census is compared class by class with the census
distribution of legitimate users: each of the 13 connected classes gets a
z-score against the legitimate mean and standard deviation, and the z vector
is scaled to unit length.
"""
from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .graph import DirectedGraph, degrees, ego_network
from .triads import FEATURE_LABELS, TriadCensus, census

STD_FLOOR = 1e-9


class BaselineError(ValueError):
    pass


@dataclass(frozen=True)
class TriadBaseline:
    mean: np.ndarray
    std: np.ndarray
    sample_size: int
    cap: int | None = None  # ego-network cap used for the sampled users

    def __post_init__(self):
        if self.mean.shape != (13,) or self.std.shape != (13,):
            raise BaselineError("baseline needs 13 means and 13 standard deviations")
        if self.sample_size < 2:
            raise BaselineError("baseline needs at least 2 users")
        if np.any(self.std < 0) or not np.all(np.isfinite(self.std)) or not np.all(np.isfinite(self.mean)):
            raise BaselineError("baseline contains invalid values")

    def to_text(self) -> str:
        lines = [
            "# triad baseline: per-class mean and population std over legitimate users",
            f"sample_size {self.sample_size}",
            f"std population floor={STD_FLOOR!r}",
            f"cap {'none' if self.cap is None else self.cap}",
        ]
        lines += [f"{lab} {m:.17g} {s:.17g}" for lab, m, s in zip(FEATURE_LABELS, self.mean, self.std)]
        return "\n".join(lines) + "\n"

    @classmethod
    def from_text(cls, text: str) -> "TriadBaseline":
        fields = {}
        rows = {}
        for line in text.splitlines():
            line = line.strip()
            if not line or line.startswith("#"):
                continue
            key, *rest = line.split()
            if key in FEATURE_LABELS:
                if len(rest) != 2:
                    raise BaselineError(f"bad baseline record: {line!r}")
                rows[key] = (float(rest[0]), float(rest[1]))
            else:
                fields[key] = rest
        missing = set(FEATURE_LABELS) - rows.keys()
        if missing or "sample_size" not in fields:
            raise BaselineError(f"incomplete baseline file (missing {sorted(missing) or 'sample_size'})")
        cap = fields.get("cap", ["none"])[0]
        return cls(
            mean=np.array([rows[k][0] for k in FEATURE_LABELS]),
            std=np.array([rows[k][1] for k in FEATURE_LABELS]),
            sample_size=int(fields["sample_size"][0]),
            cap=None if cap == "none" else int(cap),
        )

    def save(self, path) -> None:
        Path(path).write_text(self.to_text())

    @classmethod
    def load(cls, path) -> "TriadBaseline":
        try:
            text = Path(path).read_text()
        except OSError as exc:
            raise BaselineError(f"cannot read baseline {path}: {exc}") from exc
        try:
            return cls.from_text(text)
        except ValueError as exc:
            raise BaselineError(f"{path}: {exc}") from exc


def compute_baseline(censuses, cap: int | None = None) -> TriadBaseline:
    """Mean and population standard deviation of the 13 feature classes.

    Standard deviations below ``STD_FLOOR`` are raised to it so z-scores stay
    finite for classes that never vary in the sample.
    """
    rows = np.array([c.feature_counts() for c in censuses], dtype=np.float64)
    if len(rows) < 2:
        raise BaselineError("need at least 2 censuses for a baseline")
    mean = rows.mean(axis=0)
    std = np.maximum(rows.std(axis=0), STD_FLOOR)
    return TriadBaseline(mean, std, len(rows), cap)


def zscores(c: TriadCensus | np.ndarray, baseline: TriadBaseline) -> np.ndarray:
    counts = c.feature_counts() if isinstance(c, TriadCensus) else np.asarray(c)
    return (counts - baseline.mean) / baseline.std


def normalize_tsp(z) -> np.ndarray:
    """Scale ``z`` to unit Euclidean length; the zero vector stays zero."""
    z = np.asarray(z, dtype=np.float64)
    peak = np.max(np.abs(z), initial=0.0)
    if peak == 0:
        return np.zeros_like(z)
    z = z / peak  # avoids under/overflow when squaring
    return z / np.linalg.norm(z)


def ego_census(g: DirectedGraph, u, cap: int | None = None, seed=None) -> TriadCensus:
    return census(ego_network(g, u, cap=cap, seed=seed).graph)


def tsp_features(g: DirectedGraph, u, baseline: TriadBaseline, include_degrees: bool = False,
                 cap: int | None = None, seed=None) -> np.ndarray:
    """The 13 TSP values of ``u``, followed by indegree and outdegree when
    ``include_degrees`` is set."""
    tsp = normalize_tsp(zscores(ego_census(g, u, cap, seed), baseline))
    if include_degrees:
        return np.concatenate([tsp, degrees(g, u)])
    return tsp
