"""
Rayon de recouvrement rho(X_N; K) : terme correctif des certificats
obtenus par échantillonnage.
"""

from typing import Union

import numpy as np
from scipy.spatial import cKDTree

from ..utils.errors import InvalidDomainError
from .sampling import SampleSequence

PointsLike = Union[SampleSequence, np.ndarray]

# Facteur empirique du terme correctif
DEFAULT_COVERING_FACTOR = 0.05


def covering_radius_proxy(n: int, N: int, factor: float = DEFAULT_COVERING_FACTOR) -> float:
    """
    Approximation factor * (ln N / N)^(1/n) du rayon de recouvrement.

    Raises:
        ValueError: Si N < 2 ou n < 1
    """
    if N < 2:
        raise ValueError(f"Le rayon de recouvrement exige N >= 2 (reçu {N})")
    if n < 1:
        raise ValueError(f"Dimension invalide: {n}")
    if factor < 0:
        raise ValueError(f"Le facteur doit être positif (reçu {factor})")
    return float(factor * (np.log(N) / N) ** (1.0 / n))


def _as_array(points: PointsLike) -> np.ndarray:
    array = points.points if isinstance(points, SampleSequence) else np.asarray(points, dtype=float)
    return np.atleast_2d(array)


def covering_radius_empirical(samples: PointsLike, probes: PointsLike) -> float:
    """
    Plus grande distance d'une sonde à l'échantillon le plus proche.

    C'est une borne inférieure du vrai rayon de recouvrement ; elle ne
    croît jamais quand on ajoute des échantillons.
    """
    samples = _as_array(samples)
    probes = _as_array(probes)
    if samples.size == 0 or probes.size == 0:
        raise InvalidDomainError("Échantillons et sondes doivent être non vides")
    if samples.shape[1] != probes.shape[1]:
        raise InvalidDomainError("Échantillons et sondes de dimensions différentes")
    distances, _ = cKDTree(samples).query(probes, k=1)
    return float(np.max(distances))
