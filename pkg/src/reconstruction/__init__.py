"""
Module de reconstruction : duales, ReLU-synthèse, inverse PReLU et algorithme de frame
"""

from .duals import DualSynthesis, canonical_dual, relu_synthesis, facet_duals
from .reconstruct import (
    ReconstructionResult,
    reconstruct,
    reconstruct_many,
    reconstruct_by_facet,
    prelu_inverse,
)
from .frame_algorithm import relu_frame_algorithm, default_relaxation

__all__ = [
    "DualSynthesis",
    "canonical_dual",
    "relu_synthesis",
    "facet_duals",
    "ReconstructionResult",
    "reconstruct",
    "reconstruct_many",
    "reconstruct_by_facet",
    "prelu_inverse",
    "relu_frame_algorithm",
    "default_relaxation",
]
