"""
Types de base : frames, biais, ensembles d'indices et bornes de frame.
"""

from dataclasses import dataclass
from typing import Iterable, Sequence, Tuple, Union

import numpy as np

from ..utils.errors import DimensionError

# Sous-ensemble trié et sans doublon de {0, ..., m-1}
IndexSet = Tuple[int, ...]

BiasLike = Union[float, Sequence[float], np.ndarray]


@dataclass(frozen=True, eq=False)
class Frame:
    """
    Collection ordonnée de m vecteurs de R^n (lignes de la matrice des poids C).

    La matrice est stockée en lecture seule. La validité (rang n) n'est pas
    imposée à la construction : elle est vérifiée par les opérations qui
    en ont besoin.
    """
    vectors: np.ndarray

    def __post_init__(self):
        vectors = np.array(self.vectors, dtype=float, copy=True)
        if vectors.ndim == 1:
            vectors = vectors.reshape(-1, 1)
        if vectors.ndim != 2:
            raise DimensionError(f"Une frame est une matrice m x n (reçu ndim={vectors.ndim})")
        m, n = vectors.shape
        if n < 1 or m < n:
            raise DimensionError(f"Une frame exige m >= n >= 1 (reçu m={m}, n={n})")
        if not np.all(np.isfinite(vectors)):
            raise DimensionError("La frame contient des valeurs non finies")
        zero_rows = np.flatnonzero(np.all(vectors == 0.0, axis=1))
        if zero_rows.size:
            raise DimensionError(f"La frame contient le vecteur nul (indices {zero_rows.tolist()})")
        vectors.setflags(write=False)
        object.__setattr__(self, "vectors", vectors)

    @property
    def m(self) -> int:
        return self.vectors.shape[0]

    @property
    def n(self) -> int:
        return self.vectors.shape[1]

    @property
    def norms(self) -> np.ndarray:
        return np.linalg.norm(self.vectors, axis=1)

    def __len__(self) -> int:
        return self.m

    def __getitem__(self, index) -> np.ndarray:
        return self.vectors[index]

    def subset(self, indices: Iterable[int]) -> np.ndarray:
        """Matrice C_J des éléments d'indices J (lignes)."""
        return self.vectors[list(indices)]

    def scaled(self, factor: float) -> "Frame":
        return Frame(self.vectors * factor)

    def append(self, vector: np.ndarray) -> "Frame":
        return Frame(np.vstack([self.vectors, np.asarray(vector, dtype=float).reshape(1, -1)]))

    def allclose(self, other: "Frame", atol: float = 1e-15) -> bool:
        return self.vectors.shape == other.vectors.shape and np.allclose(self.vectors, other.vectors, rtol=0.0, atol=atol)

    def __repr__(self) -> str:
        return f"Frame(m={self.m}, n={self.n})"


@dataclass(frozen=True)
class FrameBounds:
    """Bornes de frame A <= B (valeurs propres extrêmes de S)."""
    lower: float
    upper: float

    @property
    def condition(self) -> float:
        return self.upper / self.lower if self.lower > 0 else float("inf")


@dataclass(frozen=True)
class BasisSelection:
    """Base la plus corrélée J*(x) avec son indicateur d'unicité."""
    indices: IndexSet
    unique: bool
    value: float  # min_{j in J} <x, phi_j>


def as_index_set(indices: Iterable[int], m: int) -> IndexSet:
    """Normalise une collection d'indices en IndexSet (trié, sans doublon)."""
    result = tuple(sorted({int(i) for i in indices}))
    if result and (result[0] < 0 or result[-1] >= m):
        raise DimensionError(f"Indices hors de [0, {m - 1}] : {list(result)}")
    return result


def as_bias(frame: Frame, bias: BiasLike) -> np.ndarray:
    """
    Convertit un biais (scalaire ou vecteur) en vecteur de longueur m.

    Raises:
        DimensionError: Si la longueur ne correspond pas à la frame
    """
    values = np.asarray(bias, dtype=float)
    if values.ndim == 0:
        return np.full(frame.m, float(values))
    values = values.reshape(-1)
    if values.shape[0] != frame.m:
        raise DimensionError(f"Le biais a {values.shape[0]} composantes, la frame en a {frame.m}")
    return values


def as_vector(frame: Frame, x) -> np.ndarray:
    """Vérifie qu'un point est de dimension n."""
    x = np.asarray(x, dtype=float).reshape(-1)
    if x.shape[0] != frame.n:
        raise DimensionError(f"Le point est de dimension {x.shape[0]}, la frame de dimension {frame.n}")
    return x


def as_points(frame: Frame, points) -> np.ndarray:
    """Vérifie qu'un lot de points est de forme (N, n)."""
    points = np.asarray(points, dtype=float)
    if points.ndim == 1:
        points = points.reshape(1, -1)
    if points.ndim != 2 or points.shape[1] != frame.n:
        raise DimensionError(f"Les points doivent être de forme (N, {frame.n}), reçu {points.shape}")
    return points
