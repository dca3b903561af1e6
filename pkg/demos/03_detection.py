"""
Training and comparing detectors
================================

Feature sets are built for every user, then random forests are compared
under stratified cross-validation. The script ends with an information-gain
ranking of the cascaded features and the ROC points of the best model.
"""

# %%
# Features
# --------
# The cascaded mode concatenates the 13 normalized triad z-scores, the
# three status features and the two raw degrees.
import numpy as np

from followspam import (SynthConfig, cross_validate, extract_features, generate, per_class_rates,
                        rank_features, roc_auc, sample_baseline)

g, labels = generate(SynthConfig(n_legit=300, n_spam=300, scale=0.3, seed=2))
baseline = sample_baseline(g, labels, sample=200, seed=0)
features = extract_features(g, labels, "cascaded", baseline)
print(features.X.shape, features.schema.columns)

# %%
# Cross-validation per feature mode
# ---------------------------------
# Every mode is a column subset of the cascaded matrix, so the census work
# is done once.
for mode in ("degree-only", "tsp", "ss+deg", "tsp+deg", "cascaded"):
    sub = features.select(mode)
    cv = cross_validate(sub.X, sub.y, k=5, algo="forest", seed=0)
    rates = per_class_rates(cv.confusion)
    print(f"{mode:>12}  acc={cv.confusion.accuracy:.3f}  auc={roc_auc(cv.scores, sub.y).auc:.3f}"
          f"  spam_tp={rates['spammer_tp_rate']:.3f}  legit_fp={rates['legit_fp_rate']:.3f}")

# %%
# Which single features split best
# --------------------------------
for name, gain in rank_features(features.X, features.y, features.schema.columns)[:8]:
    print(f"{name:>16} {gain:.3f}")

# %%
# ROC data
# --------
# The points are ready for any plotting tool; here they are just printed.
cv = cross_validate(features.X, features.y, k=5, algo="forest", seed=0)
roc = roc_auc(cv.scores, features.y)
print(roc.to_csv().splitlines()[:6], "...")
print("AUC", roc.auc)
