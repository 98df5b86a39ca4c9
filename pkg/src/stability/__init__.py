"""
Module de stabilité : bornes de frame ReLU, stabilité locale et rayon de l'image
"""

from .bounds import (
    StabilityReport,
    ReluFrameBounds,
    LocalStability,
    ImageBound,
    relu_frame_bounds,
    local_stability,
    image_ball_radius,
    stability_report,
)

__all__ = [
    "StabilityReport",
    "ReluFrameBounds",
    "LocalStability",
    "ImageBound",
    "relu_frame_bounds",
    "local_stability",
    "image_ball_radius",
    "stability_report",
]
