"""Community detection by simulating information flow from influential vertices."""

from .alpha import AlphaSet, EmptyAlphaSet, detect_alphas
from .graph import Graph, bfs_layers, largest_component, load_edge_list
from .metrics import (
    Clustering,
    GroundTruth,
    SamplingConfig,
    biased_sample_pair_rates,
    conductance,
    conductance_profile,
    load_ground_truth,
    sample_pair_rates,
)
from .propagate import Labeling, PropagationConfig, edge_probability, expected_trials_oracle, propagate_labels

__version__ = "0.1.0"

__all__ = [
    "AlphaSet",
    "Clustering",
    "EmptyAlphaSet",
    "Graph",
    "GroundTruth",
    "Labeling",
    "PropagationConfig",
    "SamplingConfig",
    "bfs_layers",
    "biased_sample_pair_rates",
    "conductance",
    "conductance_profile",
    "detect_alphas",
    "edge_probability",
    "expected_trials_oracle",
    "largest_component",
    "load_edge_list",
    "load_ground_truth",
    "propagate_labels",
    "sample_pair_rates",
]
