"""
The command-line pipeline
=========================

The ``followspam`` command chains synthesis, ingestion, baseline sampling,
feature extraction, evaluation and scoring through plain files. This script
drives it in-process through ``followspam.cli.main`` inside a temporary
directory. The shell equivalent is the same arguments after ``followspam``.
"""

# %%
import tempfile
from pathlib import Path

from followspam.cli import main

work = Path(tempfile.mkdtemp(prefix="followspam-"))


def run(*argv):
    print("$ followspam", " ".join(map(str, argv)))
    assert main([str(a) for a in argv]) == 0


# %%
# Data and features
# -----------------
run("synth", "--legit", 200, "--spam", 100, "--scale", 0.2, "--seed", 3,
    "--out-edges", work / "edges.txt", "--out-labels", work / "labels.txt")
run("ingest", "--edges", work / "edges.txt", "--out", work / "graph.npz")
run("baseline", "--graph", work / "graph.npz", "--labels", work / "labels.txt",
    "--sample", 100, "--seed", 3, "--out", work / "baseline.txt")
run("features", "--graph", work / "graph.npz", "--labels", work / "labels.txt",
    "--baseline", work / "baseline.txt", "--mode", "cascaded", "--out", work / "features.csv")

# %%
# Evaluation writes a text report and a CSV of ROC points beside it.
run("evaluate", "--features", work / "features.csv", "--algo", "forest", "--folds", 5,
    "--seed", 3, "--report", work / "report.txt")
print((work / "report.txt").read_text())

# %%
# Scoring one user
# ----------------
# A trained model stores its feature columns and the status scale, so a
# single user can be scored straight from the graph. Raw id 250 is a spammer.
run("train", "--features", work / "features.csv", "--algo", "forest", "--seed", 3,
    "--out", work / "model.json")
run("score", "--model", work / "model.json", "--graph", work / "graph.npz",
    "--baseline", work / "baseline.txt", "--user", 250)
