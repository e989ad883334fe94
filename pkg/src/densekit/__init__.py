"""Spectral and local clustering for graphs, digraphs and hypergraphs."""

from densekit.graph import (
    BipartitePair,
    Digraph,
    DomainError,
    Graph,
    Hypergraph,
    ParseError,
    bipartiteness,
    conductance,
    cut_imbalance,
    double_cover,
    flow_ratio,
    hyper_bipartiteness,
    semi_double_cover,
)

__version__ = "0.1.0"

__all__ = [
    "BipartitePair",
    "Digraph",
    "DomainError",
    "Graph",
    "Hypergraph",
    "ParseError",
    "bipartiteness",
    "conductance",
    "cut_imbalance",
    "double_cover",
    "flow_ratio",
    "hyper_bipartiteness",
    "semi_double_cover",
]
