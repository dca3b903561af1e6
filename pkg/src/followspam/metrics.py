"""Confusion counts, per-class rates, recall and ROC/AUC.

The positive class is the spammer class everywhere. Rates are reported per
class, so each class has its own true-positive rate and a false-positive rate
equal to one minus it.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

import numpy as np

# Published figures for an external ranking-based detector, shown beside our
# results in reports for comparison. Static values; never recomputed.
COLLUSIONRANK_REFERENCE = {
    "spammer_tp_rate": 0.940,
    "spammer_fp_rate": 0.060,
    "legit_tp_rate": 0.901,
    "legit_fp_rate": 0.099,
    "auc": 0.92,
}


def _binary(labels) -> np.ndarray:
    arr = np.asarray(labels)
    if arr.dtype.kind in "US":
        return (arr == "spam").astype(np.int64)
    return arr.astype(np.int64)


@dataclass(frozen=True)
class ConfusionMatrix:
    tp: int
    fn: int
    fp: int
    tn: int

    def __post_init__(self):
        if min(self.tp, self.fn, self.fp, self.tn) < 0:
            raise ValueError("confusion counts must be non-negative")

    def __add__(self, other: "ConfusionMatrix") -> "ConfusionMatrix":
        return ConfusionMatrix(self.tp + other.tp, self.fn + other.fn,
                               self.fp + other.fp, self.tn + other.tn)

    @property
    def total(self) -> int:
        return self.tp + self.fn + self.fp + self.tn

    @property
    def accuracy(self) -> float:
        if self.total == 0:
            raise ValueError("empty confusion matrix")
        return (self.tp + self.tn) / self.total


def confusion(predictions, truth) -> ConfusionMatrix:
    pred, true = _binary(predictions), _binary(truth)
    if pred.shape != true.shape:
        raise ValueError(f"{pred.size} predictions for {true.size} labels")
    return ConfusionMatrix(
        tp=int(np.count_nonzero((pred == 1) & (true == 1))),
        fn=int(np.count_nonzero((pred == 0) & (true == 1))),
        fp=int(np.count_nonzero((pred == 1) & (true == 0))),
        tn=int(np.count_nonzero((pred == 0) & (true == 0))),
    )


def _rate(num: int, den: int) -> float:
    # exact rational first, so 963/1000 prints as 0.963 and 1 - rate is exact
    return float(Fraction(num, den))


def per_class_rates(cm: ConfusionMatrix) -> dict[str, float]:
    """TP and FP rate per class.

    ``spammer_tp_rate = tp/(tp+fn)`` and ``legit_tp_rate = tn/(tn+fp)``;
    each FP rate is one minus the same class's TP rate.
    """
    spam, legit = cm.tp + cm.fn, cm.tn + cm.fp
    if spam == 0 or legit == 0:
        raise ValueError("per-class rates need both classes present")
    return {
        "spammer_tp_rate": _rate(cm.tp, spam),
        "spammer_fp_rate": _rate(cm.fn, spam),
        "legit_tp_rate": _rate(cm.tn, legit),
        "legit_fp_rate": _rate(cm.fp, legit),
    }


def recall(cm: ConfusionMatrix) -> float:
    """``tp / (tp + fn)``."""
    if cm.tp + cm.fn == 0:
        raise ValueError("recall undefined without positive rows")
    return _rate(cm.tp, cm.tp + cm.fn)


@dataclass(frozen=True)
class RocCurve:
    fpr: np.ndarray
    tpr: np.ndarray
    thresholds: np.ndarray  # score at which each point after the first is reached
    auc: float

    def points(self) -> list[tuple[float, float]]:
        return list(zip(self.fpr.tolist(), self.tpr.tolist()))

    def to_csv(self) -> str:
        return "fpr,tpr\n" + "".join(f"{x!r},{y!r}\n" for x, y in self.points())


def roc_auc(scores, truth) -> RocCurve:
    """ROC curve over every distinct score, highest first, and its
    trapezoidal area.

    Rows sharing a score enter the curve together as one diagonal step, so
    ties count one half, as in the pairwise concordance statistic.
    """
    s = np.asarray(scores, dtype=np.float64)
    y = _binary(truth)
    if s.shape != y.shape:
        raise ValueError("scores and labels differ in length")
    if not np.all(np.isfinite(s)):
        raise ValueError("scores must be finite")
    n_pos = int(y.sum())
    n_neg = len(y) - n_pos
    if n_pos == 0 or n_neg == 0:
        raise ValueError("ROC needs both classes present")
    order = np.argsort(-s, kind="stable")
    s, y = s[order], y[order]
    last_of_group = np.r_[s[1:] != s[:-1], True]
    tps = np.cumsum(y)[last_of_group]
    fps = np.cumsum(1 - y)[last_of_group]
    tpr = np.r_[0.0, tps / n_pos]
    fpr = np.r_[0.0, fps / n_neg]
    auc = float(np.sum((fpr[1:] - fpr[:-1]) * (tpr[1:] + tpr[:-1]) / 2.0))
    return RocCurve(fpr, tpr, s[last_of_group], auc)


def concordance_auc(scores, truth) -> float:
    """Fraction of (spammer, legitimate) pairs ranked correctly, ties half.

    Quadratic; a reference for :func:`roc_auc`.
    """
    s = np.asarray(scores, dtype=np.float64)
    y = _binary(truth)
    pos, neg = s[y == 1], s[y == 0]
    if len(pos) == 0 or len(neg) == 0:
        raise ValueError("need both classes")
    diff = pos[:, None] - neg[None, :]
    return float(((diff > 0).sum() + 0.5 * (diff == 0).sum()) / diff.size)


def _pct(x: float) -> str:
    return f"{100 * x:.1f}%"


def format_report(cm: ConfusionMatrix, roc: RocCurve | None = None, title: str = "",
                  extra: dict | None = None, include_points: bool = True) -> str:
    """Plain-text evaluation report.

    Per-class rows follow the TP/FP layout; a reference row from the
    external ranking detector is printed alongside.
    """
    rates = per_class_rates(cm)
    ref = COLLUSIONRANK_REFERENCE
    lines = []
    if title:
        lines.append(f"# {title}")
    for k, v in (extra or {}).items():
        lines.append(f"{k} {v}")
    lines += [
        f"rows {cm.total}",
        f"confusion tp={cm.tp} fn={cm.fn} fp={cm.fp} tn={cm.tn}",
        f"accuracy {cm.accuracy:.6f}",
        f"recall {recall(cm):.6f}",
    ]
    if roc is not None:
        lines.append(f"auc {roc.auc:.6f}")
    lines += [
        "",
        f"{'class':<12}{'TP rate':>10}{'FP rate':>10}",
        f"{'spammer':<12}{_pct(rates['spammer_tp_rate']):>10}{_pct(rates['spammer_fp_rate']):>10}",
        f"{'legitimate':<12}{_pct(rates['legit_tp_rate']):>10}{_pct(rates['legit_fp_rate']):>10}",
        "",
        "reference (Collusionrank, published values, not recomputed)",
        f"{'spammer':<12}{_pct(ref['spammer_tp_rate']):>10}{_pct(ref['spammer_fp_rate']):>10}",
        f"{'legitimate':<12}{_pct(ref['legit_tp_rate']):>10}{_pct(ref['legit_fp_rate']):>10}",
        f"{'auc':<12}{ref['auc']:>10.2f}",
    ]
    if roc is not None and include_points:
        lines += ["", "roc_points fpr tpr"]
        lines += [f"{x:.6f} {y:.6f}" for x, y in roc.points()]
    return "\n".join(lines) + "\n"
