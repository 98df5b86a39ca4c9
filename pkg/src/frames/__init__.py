"""
Module des frames : types, opérateurs, ensembles actifs et rectification
"""

from .frame import Frame, FrameBounds, BasisSelection, IndexSet, as_bias
from .numerics import Tolerances, DEFAULT_TOLERANCES, DEFAULT_ENUMERATION_CAP
from .operations import (
    analysis,
    relu_layer,
    prelu_layer,
    frame_operator,
    frame_bounds,
    is_subframe,
    active_set,
    most_correlated_basis,
    is_alpha_rectifying_on_samples,
    in_maximal_domain,
    normalize,
    is_full_spark,
    spark_rectifying_check,
    perturbed_bias,
    redundancy_witness,
    collision_pair,
)
from .catalog import builtin_frame

__all__ = [
    "Frame",
    "FrameBounds",
    "BasisSelection",
    "IndexSet",
    "as_bias",
    "Tolerances",
    "DEFAULT_TOLERANCES",
    "DEFAULT_ENUMERATION_CAP",
    "analysis",
    "relu_layer",
    "prelu_layer",
    "frame_operator",
    "frame_bounds",
    "is_subframe",
    "active_set",
    "most_correlated_basis",
    "is_alpha_rectifying_on_samples",
    "in_maximal_domain",
    "normalize",
    "is_full_spark",
    "spark_rectifying_check",
    "perturbed_bias",
    "redundancy_witness",
    "collision_pair",
    "builtin_frame",
]
