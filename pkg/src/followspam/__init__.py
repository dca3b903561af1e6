"""Follow-spam detection from ego-network triads and social status."""
from .classifier import (DecisionTree, RandomForest, TrainedModel, best_split, cross_validate,
                         info_gain, rank_features, train_forest, train_tree)
from .features import FeatureSchema, FeatureSet, extract_features, sample_baseline
from .graph import DirectedGraph, ego_network, from_raw_edges, load_edge_list, load_graph, save_graph
from .metrics import ConfusionMatrix, confusion, per_class_rates, recall, roc_auc
from .status import build_status_table, plp
from .synth import SynthConfig, attack_strength, generate
from .triads import TRIAD_LABELS, TriadCensus, census, census_bruteforce
from .tsp import TriadBaseline, compute_baseline, normalize_tsp, tsp_features

__version__ = "0.1.0"

__all__ = [
    "ConfusionMatrix", "DecisionTree", "DirectedGraph", "FeatureSchema", "FeatureSet",
    "RandomForest", "SynthConfig", "TRIAD_LABELS", "TrainedModel", "TriadBaseline", "TriadCensus",
    "attack_strength", "best_split", "build_status_table", "census", "census_bruteforce",
    "compute_baseline", "confusion", "cross_validate", "ego_network", "extract_features",
    "from_raw_edges", "generate", "info_gain", "load_edge_list", "load_graph", "normalize_tsp",
    "per_class_rates", "plp", "rank_features", "recall", "roc_auc", "sample_baseline",
    "save_graph", "train_forest", "train_tree", "tsp_features",
]
