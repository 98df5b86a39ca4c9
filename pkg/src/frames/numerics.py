"""
Outils numériques de bas niveau : tolérances, rang numérique,
valeurs propres extrêmes et résolutions symétriques définies positives.
"""

from dataclasses import dataclass, asdict
from typing import Tuple

import numpy as np
from scipy.linalg import cho_factor, cho_solve, LinAlgError

from ..utils.errors import NotAFrameError


@dataclass(frozen=True)
class Tolerances:
    """Tolérances numériques utilisées par toutes les opérations."""
    rank: float = 1e-10  # seuil relatif du rang numérique
    tie: float = 1e-9  # détection des égalités (bases, frontières)
    face: float = 1e-9  # coplanarité des facettes
    solver: float = 1e-8  # convergence des programmes convexes
    membership: float = 1e-12  # appartenance aux domaines (relative)

    def __post_init__(self):
        for name, value in asdict(self).items():
            if not value > 0:
                raise ValueError(f"La tolérance '{name}' doit être positive (reçu {value})")

    def to_dict(self) -> dict:
        return asdict(self)


DEFAULT_TOLERANCES = Tolerances()

# Plafond de l'énumération brute des sous-ensembles C(m, n)
DEFAULT_ENUMERATION_CAP = 1_000_000


def rank_threshold(singular_values: np.ndarray, shape: Tuple[int, int], tol: Tolerances = DEFAULT_TOLERANCES) -> float:
    """Seuil tau_rank = tol.rank * max(m, n) * sigma_max."""
    if singular_values.size == 0:
        return 0.0
    return tol.rank * max(shape) * float(np.max(singular_values))


def numerical_rank(matrix: np.ndarray, tol: Tolerances = DEFAULT_TOLERANCES) -> int:
    """
    Rang numérique d'une matrice par décomposition en valeurs singulières.

    Args:
        matrix: Matrice (k, n), éventuellement vide
        tol: Tolérances

    Returns:
        Nombre de valeurs singulières au-dessus du seuil relatif
    """
    matrix = np.atleast_2d(np.asarray(matrix, dtype=float))
    if matrix.size == 0:
        return 0
    singular_values = np.linalg.svd(matrix, compute_uv=False)
    threshold = rank_threshold(singular_values, matrix.shape, tol)
    if singular_values[0] == 0.0:
        return 0
    return int(np.sum(singular_values > threshold))


def stacked_full_rank(stack: np.ndarray, tol: Tolerances = DEFAULT_TOLERANCES) -> np.ndarray:
    """
    Teste en lot si des matrices carrées (k, n, n) sont de rang plein.

    Returns:
        Tableau booléen de longueur k
    """
    singular_values = np.linalg.svd(stack, compute_uv=False)
    n = stack.shape[-1]
    threshold = tol.rank * n * singular_values[:, 0]
    return (singular_values[:, -1] > threshold) & (singular_values[:, 0] > 0.0)


def eigen_extremes(symmetric: np.ndarray) -> Tuple[float, float]:
    """Plus petite et plus grande valeur propre d'une matrice symétrique."""
    eigenvalues = np.linalg.eigvalsh(symmetric)
    return float(eigenvalues[0]), float(eigenvalues[-1])


def spd_solve(matrix: np.ndarray, rhs: np.ndarray) -> np.ndarray:
    """
    Résout matrix @ X = rhs pour une matrice symétrique définie positive.

    Raises:
        NotAFrameError: Si la factorisation de Cholesky échoue
    """
    try:
        factor = cho_factor(matrix, lower=True, check_finite=True)
    except LinAlgError as e:
        raise NotAFrameError(f"Opérateur de frame non inversible : {e}") from e
    return cho_solve(factor, rhs)


def null_vector(matrix: np.ndarray, n: int, tol: Tolerances = DEFAULT_TOLERANCES) -> np.ndarray:
    """
    Vecteur unitaire orthogonal aux lignes de ``matrix`` (noyau de la matrice).

    Une matrice sans ligne renvoie le premier vecteur de la base canonique.
    """
    matrix = np.asarray(matrix, dtype=float).reshape(-1, n)
    if matrix.shape[0] == 0:
        vector = np.zeros(n)
        vector[0] = 1.0
        return vector
    _, _, vt = np.linalg.svd(matrix, full_matrices=True)
    rank = numerical_rank(matrix, tol)
    if rank >= n:
        raise ValueError("La matrice est de rang plein : noyau trivial")
    return vt[rank]
