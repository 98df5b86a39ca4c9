"""
Module du polytope inscrit : facettes, cônes et omnidirectionnalité
"""

from .facets import Facet, FacetHit, FacetStructure, enumerate_facets, facet_for_point, assign_facets
from .omnidirectional import is_omnidirectional, is_omnidirectional_lp, make_omnidirectional

__all__ = [
    "Facet",
    "FacetHit",
    "FacetStructure",
    "enumerate_facets",
    "facet_for_point",
    "assign_facets",
    "is_omnidirectional",
    "is_omnidirectional_lp",
    "make_omnidirectional",
]
