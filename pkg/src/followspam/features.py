"""Feature schemas, batch extraction and the feature file format.

A feature file is plain text::

    # followspam features
    # mode cascaded
    # normalization {"followee_status": [lo, hi]}
    user,021D,...,outdegree,label
    17,0.0123,...,42,spam

Values are written with full float precision so files round-trip exactly.
"""
from __future__ import annotations

import json
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .graph import DirectedGraph
from .status import SS_COLUMNS, MinMaxScale, build_status_table, ss_features
from .synth import LEGIT, SPAM
from .triads import FEATURE_LABELS
from .tsp import TriadBaseline, compute_baseline, ego_census, normalize_tsp, zscores

DEGREE_COLUMNS = ("indegree", "outdegree")
TSP_COLUMNS = tuple(FEATURE_LABELS)

MODES = {
    "degree-only": DEGREE_COLUMNS,
    "tsp": TSP_COLUMNS,
    "tsp+deg": TSP_COLUMNS + DEGREE_COLUMNS,
    "ss": SS_COLUMNS,
    "ss+deg": SS_COLUMNS + DEGREE_COLUMNS,
    "cascaded": TSP_COLUMNS + SS_COLUMNS + DEGREE_COLUMNS,
}


class FeatureFileError(ValueError):
    pass


@dataclass(frozen=True)
class FeatureSchema:
    mode: str
    columns: tuple[str, ...]

    @classmethod
    def for_mode(cls, mode: str) -> "FeatureSchema":
        if mode not in MODES:
            raise ValueError(f"unknown feature mode {mode!r}; choose from {', '.join(MODES)}")
        return cls(mode, MODES[mode])

    @property
    def uses_tsp(self) -> bool:
        return self.columns[0] == TSP_COLUMNS[0]

    @property
    def uses_status(self) -> bool:
        return SS_COLUMNS[0] in self.columns

    @property
    def uses_degrees(self) -> bool:
        return DEGREE_COLUMNS[0] in self.columns


@dataclass
class FeatureSet:
    schema: FeatureSchema
    users: np.ndarray       # original node ids
    X: np.ndarray
    y: np.ndarray           # 1 spammer, 0 legitimate
    normalization: dict = field(default_factory=dict)

    def __len__(self):
        return len(self.users)

    def select(self, mode: str) -> "FeatureSet":
        """Project onto the columns of a smaller mode."""
        schema = FeatureSchema.for_mode(mode)
        missing = [c for c in schema.columns if c not in self.schema.columns]
        if missing:
            raise ValueError(f"mode {mode} needs columns {missing} absent from {self.schema.mode}")
        idx = [self.schema.columns.index(c) for c in schema.columns]
        norm = self.normalization if schema.uses_status else {}
        return FeatureSet(schema, self.users, self.X[:, idx], self.y, dict(norm))

    def to_text(self) -> str:
        head = [
            "# followspam features",
            f"# mode {self.schema.mode}",
            f"# normalization {json.dumps(self.normalization, sort_keys=True)}",
            ",".join(("user",) + self.schema.columns + ("label",)),
        ]
        body = [
            ",".join([str(int(u))] + [repr(float(v)) for v in row] + [SPAM if lab else LEGIT])
            for u, row, lab in zip(self.users, self.X, self.y)
        ]
        return "\n".join(head + body) + "\n"

    def save(self, path) -> None:
        Path(path).write_text(self.to_text())

    @classmethod
    def from_text(cls, text: str, source: str = "<features>") -> "FeatureSet":
        meta = {}
        lines = text.splitlines()
        i = 0
        while i < len(lines) and lines[i].startswith("#"):
            parts = lines[i][1:].strip().split(None, 1)
            if len(parts) == 2:
                meta[parts[0]] = parts[1]
            i += 1
        if "mode" not in meta:
            raise FeatureFileError(f"{source}: missing '# mode' header")
        try:
            schema = FeatureSchema.for_mode(meta["mode"])
            norm = json.loads(meta.get("normalization", "{}"))
        except ValueError as exc:
            raise FeatureFileError(f"{source}: {exc}") from exc
        if i >= len(lines):
            raise FeatureFileError(f"{source}: missing column header")
        expected = ("user",) + schema.columns + ("label",)
        if tuple(lines[i].split(",")) != expected:
            raise FeatureFileError(f"{source}: column header does not match mode {schema.mode}")
        users, rows, labels = [], [], []
        for lineno, line in enumerate(lines[i + 1:], i + 2):
            if not line.strip():
                continue
            cells = line.split(",")
            if len(cells) != len(expected):
                raise FeatureFileError(f"{source}:{lineno}: expected {len(expected)} fields, got {len(cells)}")
            try:
                users.append(int(cells[0]))
                rows.append([float(c) for c in cells[1:-1]])
            except ValueError as exc:
                raise FeatureFileError(f"{source}:{lineno}: {exc}") from exc
            if cells[-1] not in (SPAM, LEGIT):
                raise FeatureFileError(f"{source}:{lineno}: label must be spam or legit")
            labels.append(cells[-1] == SPAM)
        X = np.array(rows, dtype=np.float64).reshape(len(rows), len(schema.columns))
        if not np.all(np.isfinite(X)):
            raise FeatureFileError(f"{source}: non-finite feature value")
        return cls(schema, np.array(users, dtype=np.int64), X, np.array(labels, dtype=np.int64), norm)

    @classmethod
    def load(cls, path) -> "FeatureSet":
        try:
            text = Path(path).read_text()
        except OSError as exc:
            raise FeatureFileError(f"cannot read features {path}: {exc}") from exc
        return cls.from_text(text, str(path))


def _censuses(g: DirectedGraph, users, cap, seed, workers: int):
    users = [int(u) for u in users]

    def one(u):
        # per-user seed, so capped samples do not depend on scheduling
        return ego_census(g, u, cap, None if cap is None else (seed, u))

    if workers > 1 and len(users) > 1:
        with ThreadPoolExecutor(workers) as pool:
            return list(pool.map(one, users))
    return [one(u) for u in users]


def sample_baseline(g: DirectedGraph, labels: dict[int, str], sample: int = 1000, seed: int = 0,
                    cap: int | None = None, workers: int = 1) -> TriadBaseline:
    """Triad baseline over a uniform sample of legitimate users.

    All legitimate users are used when there are no more than ``sample``.
    """
    legit = np.array(sorted(g.index(r) for r, lab in labels.items() if lab == LEGIT), dtype=np.int64)
    if len(legit) < 2:
        raise ValueError("need at least 2 labelled legitimate users for a baseline")
    if len(legit) > sample:
        legit = np.sort(np.random.default_rng(seed).choice(legit, size=sample, replace=False))
    return compute_baseline(_censuses(g, legit, cap, seed, workers), cap=cap)


def _row_block(g, users, schema, baseline, cap, seed, scale, workers):
    blocks = []
    if schema.uses_tsp:
        if baseline is None:
            raise ValueError(f"mode {schema.mode} needs a triad baseline")
        cs = _censuses(g, users, cap, seed, workers)
        blocks.append(np.array([normalize_tsp(zscores(c, baseline)) for c in cs]).reshape(len(users), 13))
    if schema.uses_status:
        rows, scale = ss_features(g, build_status_table(g), users, scale=scale)
        blocks.append(rows)
    if schema.uses_degrees:
        blocks.append(np.column_stack([g.indegrees()[users], g.outdegrees()[users]]).astype(np.float64))
    return np.hstack(blocks), scale


def extract_features(g: DirectedGraph, labels: dict[int, str], mode: str,
                     baseline: TriadBaseline | None = None, cap: int | None = None,
                     seed: int = 0, workers: int = 1) -> FeatureSet:
    """Feature rows for every labelled user, ordered by original id.

    Followee status is min-max scaled over this batch; the scale is kept in
    ``normalization`` for later scoring, along with the ego cap and sampler
    seed of TSP modes.
    """
    schema = FeatureSchema.for_mode(mode)
    raw = np.array(sorted(labels), dtype=np.int64)
    users = np.array([g.index(r) for r in raw], dtype=np.int64)
    X, scale = _row_block(g, users, schema, baseline, cap, seed, None, workers)
    norm = {}
    if scale is not None:
        norm["followee_status"] = [scale.lo, scale.hi]
    if schema.uses_tsp:
        norm["ego_cap"] = cap
        if cap is not None:
            norm["ego_seed"] = seed
    y = np.array([labels[int(r)] == SPAM for r in raw], dtype=np.int64)
    return FeatureSet(schema, raw, X, y, norm)


def user_features(g: DirectedGraph, raw_id: int, mode: str, baseline: TriadBaseline | None = None,
                  normalization: dict | None = None, cap: int | None = None, seed: int = 0) -> np.ndarray:
    """One user's row, reusing a stored followee-status scale."""
    schema = FeatureSchema.for_mode(mode)
    scale = None
    if schema.uses_status:
        try:
            lo, hi = (normalization or {})["followee_status"]
        except (KeyError, TypeError, ValueError):
            raise ValueError("model has no followee-status normalization") from None
        scale = MinMaxScale(float(lo), float(hi))
    u = g.index(raw_id)
    X, _ = _row_block(g, np.array([u]), schema, baseline, cap, seed, scale, 1)
    return X[0]
