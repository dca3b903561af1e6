"""Labelled synthetic follow networks.

Legitimate users form a network grown by preferential attachment with
reciprocation and triadic closure, around a small mutually-following core of
high-appeal accounts that rarely follow back. Spammers follow uniformly random
legitimate users, and each target follows back with a fixed probability.

Node ids: legitimate users are ``0..n_legit-1``, spammers follow.
"""
from __future__ import annotations

import json
import logging
import math
from dataclasses import asdict, dataclass
from pathlib import Path

import numpy as np

from .graph import DirectedGraph, write_edge_list

log = logging.getLogger(__name__)

SPAM, LEGIT = "spam", "legit"


class SynthConfigError(ValueError):
    pass


@dataclass(frozen=True)
class SynthConfig:
    n_legit: int = 1000
    n_spam: int = 1000
    legit_mean_out: float = 462.0
    legit_mean_in: float = 401.5
    spam_mean_out: float = 866.5
    follow_back_prob: float = 0.82
    triadic_closure_prob: float = 0.15
    seed: int = 0
    scale: float = 0.1
    # shape knobs, not tied to measured figures. Ordinary users always
    # return a follow; the top celebrity_fraction by appeal only return
    # follows from each other.
    legit_reciprocity: float = 1.0
    celebrity_fraction: float = 0.03
    degree_sigma: float = 0.3
    appeal_sigma: float = 2.0

    def validate(self) -> None:
        if self.n_legit < 1 or self.n_spam < 1:
            raise SynthConfigError("n_legit and n_spam must be >= 1")
        for name in ("follow_back_prob", "triadic_closure_prob", "legit_reciprocity",
                     "celebrity_fraction"):
            if not 0.0 <= getattr(self, name) <= 1.0:
                raise SynthConfigError(f"{name} must lie in [0, 1]")
        if self.scale <= 0 or self.degree_sigma < 0 or self.appeal_sigma < 0:
            raise SynthConfigError("scale must be positive and the sigmas non-negative")
        for name in ("legit_mean_out", "legit_mean_in", "spam_mean_out"):
            if getattr(self, name) <= 0:
                raise SynthConfigError(f"{name} must be positive")
        if self.legit_mean_out * self.scale > self.n_legit - 1:
            raise SynthConfigError("legitimate out-degree target exceeds the number of legitimate users")
        if self.spam_mean_out * self.scale > self.n_legit:
            raise SynthConfigError("spammer out-degree target exceeds the number of legitimate users")


def _lognormal_targets(rng, mean, sigma, size):
    mu = math.log(mean) - sigma ** 2 / 2
    return rng.lognormal(mu, sigma, size)


def _legit_network(cfg: SynthConfig, rng) -> list[set]:
    n = cfg.n_legit
    out_target = np.clip(np.rint(_lognormal_targets(rng, cfg.legit_mean_out * cfg.scale,
                                                    cfg.degree_sigma, n)), 1, n - 1).astype(int)
    # attractiveness: how strongly a user draws followers beyond its current indegree
    appeal = _lognormal_targets(rng, cfg.legit_mean_in * cfg.scale, cfg.appeal_sigma, n)
    # celebrities (top appeal) only follow back other celebrities
    celeb = appeal >= np.quantile(appeal, 1.0 - cfg.celebrity_fraction)
    follows = [set() for _ in range(n)]
    indeg = np.zeros(n)
    core = np.flatnonzero(celeb)
    for i in core:
        follows[i].update(int(j) for j in core if j != i)
        indeg[i] += len(core) - 1
    order = rng.permutation(n)
    # two passes so later closures find followees-of-followees to close on
    for part in (0, 1):
        for i in order:
            k = out_target[i] // 2 if part == 0 else out_target[i] - len(follows[i])
            if k <= 0:
                continue
            fi = follows[i]
            n_close = rng.binomial(k, cfg.triadic_closure_prob)
            new = []
            if n_close and fi:
                cands = set()
                for j in fi:
                    cands |= follows[j]
                cands -= fi
                cands.discard(i)
                if cands:
                    cands = np.fromiter(sorted(cands), dtype=np.int64)
                    new.extend(rng.choice(cands, size=min(n_close, len(cands)), replace=False).tolist())
            need = k - len(new)
            if need > 0:
                w = indeg + appeal
                w[i] = 0.0
                w[list(fi)] = 0.0
                w[new] = 0.0
                avail = np.count_nonzero(w)
                new.extend(rng.choice(n, size=min(need, avail), replace=False, p=w / w.sum()).tolist())
            for j in new:
                fi.add(j)
                indeg[j] += 1
                if i not in follows[j] and (celeb[i] or not celeb[j]) and rng.random() < cfg.legit_reciprocity:
                    follows[j].add(i)
                    indeg[i] += 1
    return follows


def generate(cfg: SynthConfig) -> tuple[DirectedGraph, dict[int, str]]:
    """Build a labelled synthetic follow graph; deterministic in ``cfg.seed``."""
    cfg.validate()
    rng = np.random.default_rng(cfg.seed)
    follows = _legit_network(cfg, rng)
    src = [i for i, fs in enumerate(follows) for _ in fs]
    dst = [j for fs in follows for j in sorted(fs)]

    n_legit, n = cfg.n_legit, cfg.n_legit + cfg.n_spam
    for s in range(n_legit, n):
        k = min(rng.poisson(cfg.spam_mean_out * cfg.scale), n_legit)
        targets = np.sort(rng.choice(n_legit, size=k, replace=False))
        back = rng.random(k) < cfg.follow_back_prob
        src.extend([s] * k)
        dst.extend(targets.tolist())
        src.extend(targets[back].tolist())
        dst.extend([s] * int(back.sum()))

    g = DirectedGraph.from_edges(np.array(src, dtype=np.int64), np.array(dst, dtype=np.int64), n=n)
    labels = {u: (LEGIT if u < n_legit else SPAM) for u in range(n)}
    log.info("generated %r from seed %d", g, cfg.seed)
    return g, labels


def attack_strength(g: DirectedGraph, labels: dict[int, str] | None, s) -> float:
    """Fraction of ``s``'s followees that follow ``s`` back."""
    followees = g.successors(s)
    if len(followees) == 0:
        raise ValueError(f"node {s} follows nobody; attack strength undefined")
    if labels is not None and labels.get(int(g.raw_ids[s])) != SPAM:
        log.warning("attack strength requested for non-spammer %s", g.raw_ids[s])
    back = np.isin(followees, g.predecessors(s), assume_unique=True)
    return float(np.count_nonzero(back) / len(followees))


def write_labels(g: DirectedGraph, labels: dict[int, str], path) -> None:
    with open(path, "w") as fh:
        for raw in g.raw_ids:
            fh.write(f"{raw} {labels[int(raw)]}\n")


class LabelFileError(ValueError):
    pass


def read_labels(path) -> dict[int, str]:
    labels = {}
    try:
        lines = Path(path).read_text().splitlines()
    except OSError as exc:
        raise LabelFileError(f"cannot read labels {path}: {exc}") from exc
    for lineno, line in enumerate(lines, 1):
        s = line.strip()
        if not s or s.startswith("#"):
            continue
        parts = s.split()
        if len(parts) != 2 or not parts[0].isdigit() or parts[1] not in (SPAM, LEGIT):
            raise LabelFileError(f"{path}:{lineno}: expected '<nodeid> spam|legit', got {s!r}")
        labels[int(parts[0])] = parts[1]
    return labels


def write_dataset(cfg: SynthConfig, edges_path, labels_path) -> tuple[DirectedGraph, dict[int, str]]:
    """Generate and write edge list, label file and ``<edges>.meta.json``."""
    g, labels = generate(cfg)
    write_edge_list(g, edges_path)
    write_labels(g, labels, labels_path)
    meta = {"config": asdict(cfg), "nodes": g.node_count, "edges": g.edge_count}
    Path(str(edges_path) + ".meta.json").write_text(json.dumps(meta, indent=2, sort_keys=True) + "\n")
    return g, labels
