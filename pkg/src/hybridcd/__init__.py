"""Hybrid (noise-based + constraint-based) causal discovery for time series."""
from .graph import CausalOrder, ExtendedGraph, LaggedNode, SummaryGraph, WindowGraph
from .hybrid import DiscoveryConfig, DiscoveryResult, cbnb, discover, nbcb
from .stats import Dataset

__all__ = ["CausalOrder", "Dataset", "DiscoveryConfig", "DiscoveryResult", "ExtendedGraph",
           "LaggedNode", "SummaryGraph", "WindowGraph", "cbnb", "discover", "nbcb"]
