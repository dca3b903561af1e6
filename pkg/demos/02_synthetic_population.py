"""
A synthetic follow graph with spammers
======================================

The generator builds a legitimate network by degree-targeted preferential
attachment with reciprocation and triadic closure, then adds spammers that
follow random legitimate users. Each target follows back with a fixed
probability. This script looks at the result through attack strength,
social status and triad z-scores.
"""

# %%
# Generate a small population
# ---------------------------
# ``scale`` shrinks the mean out-degrees so the demo runs in seconds.
import numpy as np

from followspam import SynthConfig, attack_strength, build_status_table, generate, sample_baseline
from followspam.triads import TRIAD_LABELS
from followspam.tsp import ego_census, zscores

cfg = SynthConfig(n_legit=400, n_spam=400, scale=0.3, seed=1)
g, labels = generate(cfg)
spam = np.array([labels[int(r)] == "spam" for r in g.raw_ids])
print(g, f"spammers={spam.sum()}")

# %%
# Attack strength is the share of a spammer's followees that follow back.
# It should sit near the configured follow-back probability.
strength = [attack_strength(g, labels, u) for u in np.flatnonzero(spam)]
print(f"attack strength mean={np.mean(strength):.3f} (configured {cfg.follow_back_prob})")

# %%
# Social status
# -------------
# Status is indegree over outdegree. Spammers follow many accounts that
# mostly ignore them, so their status is lower.
st = build_status_table(g)
print(f"status  legit={st.status[~spam].mean():.2f}  spam={st.status[spam].mean():.2f}")

# %%
# Triad z-scores
# --------------
# The baseline holds the mean and spread of each triad count over a sample
# of legitimate users. A spammer's ego network is a star of one-way and
# mutual arcs into strangers, so closed triads come out below baseline.
baseline = sample_baseline(g, labels, sample=200, seed=0)
z = np.array([zscores(ego_census(g, u), baseline) for u in np.flatnonzero(spam)])
for label, value in zip(TRIAD_LABELS[3:], z.mean(axis=0)):
    print(f"{label:>5} {value:+.3f}")
