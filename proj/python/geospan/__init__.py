"""Balanced-tree embeddings in random geometric graphs."""

from ._geospan import (
    compute_k,
    contains_balanced_tree,
    diameter_witness,
    embed,
    graph_stats,
    sample_uniform,
    star_partition,
    sweep_csv,
    threshold_radius,
    tree_size,
    verify,
    wilson_interval,
)

__all__ = [
    "compute_k",
    "contains_balanced_tree",
    "diameter_witness",
    "embed",
    "graph_stats",
    "sample_uniform",
    "star_partition",
    "sweep_csv",
    "threshold_radius",
    "tree_size",
    "verify",
    "wilson_interval",
]
