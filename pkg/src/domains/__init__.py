"""
Module des domaines : description, appartenance, échantillonnage et recouvrement
"""

from .domain import DomainSpec, Variant, contains
from .sampling import SampleSequence, make_rng, sample, sample_directions, radial_profile
from .covering import covering_radius_proxy, covering_radius_empirical

__all__ = [
    "DomainSpec",
    "Variant",
    "contains",
    "SampleSequence",
    "make_rng",
    "sample",
    "sample_directions",
    "radial_profile",
    "covering_radius_proxy",
    "covering_radius_empirical",
]
