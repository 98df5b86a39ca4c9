"""
Opérations sur les frames : opérateurs d'analyse et de frame, couche ReLU,
ensembles actifs, bases les plus corrélées et tests de rectification.

Toutes les fonctions sont pures : elles ne modifient jamais leurs entrées et
peuvent être appelées en parallèle sur des lots d'échantillons disjoints.
"""

from itertools import combinations, islice
from math import comb
from typing import Callable, Dict, NamedTuple, Optional, Tuple

import numpy as np
from loguru import logger

from ..utils.errors import EnumerationCapError, NotAFrameError
from .frame import (
    BasisSelection,
    BiasLike,
    Frame,
    FrameBounds,
    IndexSet,
    as_bias,
    as_index_set,
    as_points,
    as_vector,
)
from .numerics import (
    DEFAULT_ENUMERATION_CAP,
    DEFAULT_TOLERANCES,
    Tolerances,
    eigen_extremes,
    null_vector,
    numerical_rank,
    stacked_full_rank,
)

# Taille des lots pour les calculs vectorisés sur de grands ensembles de points
CHUNK_SIZE = 20_000


class RectifyingResult(NamedTuple):
    """Verdict de rectification sur un ensemble d'échantillons."""
    rectifying: bool
    failing_points: np.ndarray
    failing_indices: np.ndarray
    distinct_active_sets: int


# --------------------------------------------------------------------------
# Opérateurs
# --------------------------------------------------------------------------

def analysis(frame: Frame, x) -> np.ndarray:
    """
    Opérateur d'analyse C : x -> (<x, phi_i>)_i.

    Args:
        frame: Frame de R^n
        x: Point de dimension n

    Returns:
        Vecteur des m coefficients de frame

    Raises:
        DimensionError: Si x n'est pas de dimension n
    """
    return frame.vectors @ as_vector(frame, x)


def coefficients(frame: Frame, points) -> np.ndarray:
    """Coefficients de frame d'un lot de points, matrice (N, m)."""
    return as_points(frame, points) @ frame.vectors.T


def relu_layer(frame: Frame, bias: BiasLike, x) -> np.ndarray:
    """
    Couche ReLU C_alpha : x -> max(0, <x, phi_i> - alpha_i).

    Accepte un point (n,) ou un lot (N, n).
    """
    alpha = as_bias(frame, bias)
    x = np.asarray(x, dtype=float)
    if x.ndim == 1:
        return np.maximum(0.0, analysis(frame, x) - alpha)
    return np.maximum(0.0, coefficients(frame, x) - alpha)


def prelu_layer(frame: Frame, bias: BiasLike, x, gamma: float) -> np.ndarray:
    """Couche PReLU : s -> max(gamma * s, s) appliquée à <x, phi_i> - alpha_i."""
    if not 0.0 < gamma <= 1.0:
        raise ValueError(f"gamma doit appartenir à ]0, 1] (reçu {gamma})")
    alpha = as_bias(frame, bias)
    x = np.asarray(x, dtype=float)
    shifted = (analysis(frame, x) if x.ndim == 1 else coefficients(frame, x)) - alpha
    return np.maximum(gamma * shifted, shifted)


def frame_operator(frame: Frame) -> np.ndarray:
    """Opérateur de frame S = D C = somme des phi_i phi_i^T."""
    return frame.vectors.T @ frame.vectors


def frame_bounds(frame: Frame, tol: Tolerances = DEFAULT_TOLERANCES) -> FrameBounds:
    """
    Bornes de frame optimales (A, B) = (lambda_min(S), lambda_max(S)).

    Raises:
        NotAFrameError: Si la collection n'est pas de rang n
    """
    if numerical_rank(frame.vectors, tol) < frame.n:
        raise NotAFrameError(f"Pas une frame : rang < {frame.n}")
    lower, upper = eigen_extremes(frame_operator(frame))
    return FrameBounds(lower=lower, upper=upper)


def subframe_bounds(frame: Frame, indices: IndexSet) -> FrameBounds:
    """Bornes (A_J, B_J) de la sous-collection Phi_J (A_J = 0 si ce n'est pas une frame)."""
    sub = frame.subset(indices)
    if sub.shape[0] == 0:
        return FrameBounds(0.0, 0.0)
    lower, upper = eigen_extremes(sub.T @ sub)
    return FrameBounds(lower=max(lower, 0.0), upper=upper)


def is_subframe(frame: Frame, idx, tol: Tolerances = DEFAULT_TOLERANCES) -> bool:
    """Vrai si Phi_idx est de rang n (la sous-collection est une frame)."""
    indices = as_index_set(idx, frame.m)
    if len(indices) < frame.n:
        return False
    return numerical_rank(frame.subset(indices), tol) == frame.n


# --------------------------------------------------------------------------
# Ensembles actifs et bases
# --------------------------------------------------------------------------

def active_set(frame: Frame, bias: BiasLike, x, widen: float = 0.0) -> IndexSet:
    """
    Ensemble actif I_x^alpha = { i : <x, phi_i> >= alpha_i }.

    La comparaison est exacte ; ``widen`` > 0 élargit l'ensemble de
    ``widen`` pour détecter les cas limites.
    """
    alpha = as_bias(frame, bias)
    coeffs = analysis(frame, x)
    return tuple(int(i) for i in np.flatnonzero(coeffs >= alpha - widen))


def boundary_indices(frame: Frame, bias: BiasLike, x, tol: Tolerances = DEFAULT_TOLERANCES) -> IndexSet:
    """Indices dont le coefficient est à tol.tie près du seuil."""
    alpha = as_bias(frame, bias)
    coeffs = analysis(frame, x)
    return tuple(int(i) for i in np.flatnonzero(np.abs(coeffs - alpha) <= tol.tie))


def most_correlated_basis(
    frame: Frame,
    x,
    full_spark: bool = False,
    tol: Tolerances = DEFAULT_TOLERANCES,
) -> BasisSelection:
    """
    Base la plus corrélée J*(x) : maximise min_{j in J} <x, phi_j> parmi les bases.

    Pour une frame full-spark, ce sont les n plus grands coefficients. Sinon
    l'algorithme glouton du matroïde vectoriel (ajout par coefficients
    décroissants tant que le rang augmente) donne une base optimale.
    L'unicité échoue dès qu'un indice hors de J atteint la valeur min à
    tol.tie près, car il peut alors être échangé contre un élément de J.

    Raises:
        NotAFrameError: Si la frame n'est pas de rang n
    """
    coeffs = analysis(frame, x)
    order = np.argsort(-coeffs, kind="stable")
    n = frame.n

    if full_spark:
        chosen = [int(i) for i in order[:n]]
    else:
        chosen = []
        for i in order:
            candidate = chosen + [int(i)]
            if numerical_rank(frame.subset(candidate), tol) == len(candidate):
                chosen = candidate
                if len(chosen) == n:
                    break
        if len(chosen) < n:
            raise NotAFrameError("Pas de base dans la frame : rang < n")

    value = float(np.min(coeffs[chosen]))
    unique = int(np.sum(coeffs >= value - tol.tie)) == n
    return BasisSelection(indices=tuple(sorted(chosen)), unique=unique, value=value)


def most_correlated_basis_bruteforce(
    frame: Frame,
    x,
    cap: int = DEFAULT_ENUMERATION_CAP,
    tol: Tolerances = DEFAULT_TOLERANCES,
) -> BasisSelection:
    """
    Version par énumération de toutes les bases (référence pour les tests).

    Raises:
        EnumerationCapError: Si C(m, n) dépasse ``cap``
    """
    count = comb(frame.m, frame.n)
    if count > cap:
        raise EnumerationCapError(count, cap)
    coeffs = analysis(frame, x)
    best: Optional[Tuple[int, ...]] = None
    best_value = -np.inf
    values = []
    for subset in combinations(range(frame.m), frame.n):
        if numerical_rank(frame.subset(subset), tol) < frame.n:
            continue
        value = float(np.min(coeffs[list(subset)]))
        values.append(value)
        if value > best_value:
            best, best_value = subset, value
    if best is None:
        raise NotAFrameError("Pas de base dans la frame : rang < n")
    ties = sum(1 for v in values if v >= best_value - tol.tie)
    return BasisSelection(indices=tuple(best), unique=ties == 1, value=best_value)


def top_n_bases(coeffs: np.ndarray, n: int) -> np.ndarray:
    """J*(x) en lot pour une frame full-spark : indices des n plus grands coefficients."""
    return np.argsort(-coeffs, axis=1, kind="stable")[:, :n]


# --------------------------------------------------------------------------
# Rectification
# --------------------------------------------------------------------------

def _pattern_checker(frame: Frame, tol: Tolerances) -> Callable[[np.ndarray], bool]:
    """Teste si un masque actif contient une frame, avec cache par motif."""
    cache: Dict[bytes, bool] = {}

    def check(mask: np.ndarray) -> bool:
        key = np.packbits(mask).tobytes()
        if key not in cache:
            count = int(mask.sum())
            cache[key] = count >= frame.n and numerical_rank(frame.vectors[mask], tol) == frame.n
        return cache[key]

    check.cache = cache
    return check


def _domain_verdicts(frame: Frame, alpha: np.ndarray, points: np.ndarray, tol: Tolerances) -> Tuple[np.ndarray, int]:
    """Verdict par point et nombre d'ensembles actifs distincts rencontrés."""
    checker = _pattern_checker(frame, tol)
    result = np.empty(points.shape[0], dtype=bool)
    for start in range(0, points.shape[0], CHUNK_SIZE):
        block = points[start:start + CHUNK_SIZE] @ frame.vectors.T >= alpha
        patterns, inverse = np.unique(block, axis=0, return_inverse=True)
        verdicts = np.array([checker(p) for p in patterns], dtype=bool)
        result[start:start + CHUNK_SIZE] = verdicts[inverse.reshape(-1)]
    return result, len(checker.cache)


def maximal_domain_mask(frame: Frame, bias: BiasLike, points, tol: Tolerances = DEFAULT_TOLERANCES) -> np.ndarray:
    """
    Appartenance au domaine maximal K*_alpha pour un lot de points.

    Returns:
        Tableau booléen (N,) : vrai si l'ensemble actif du point contient une base
    """
    verdicts, _ = _domain_verdicts(frame, as_bias(frame, bias), as_points(frame, points), tol)
    return verdicts


def is_alpha_rectifying_on_samples(
    frame: Frame,
    bias: BiasLike,
    samples,
    tol: Tolerances = DEFAULT_TOLERANCES,
) -> RectifyingResult:
    """
    Teste si Phi est alpha-rectifiant sur un ensemble fini de points.

    Args:
        frame: Frame
        bias: Biais alpha
        samples: Points (N, n)
        tol: Tolérances (rang numérique)

    Returns:
        RectifyingResult avec les points en échec
    """
    points = as_points(frame, samples)
    ok, distinct = _domain_verdicts(frame, as_bias(frame, bias), points, tol)
    failing = np.flatnonzero(~ok)
    if failing.size:
        logger.debug(f"{failing.size} point(s) sur {points.shape[0]} hors du domaine rectifiant")
    return RectifyingResult(
        rectifying=failing.size == 0,
        failing_points=points[failing],
        failing_indices=failing,
        distinct_active_sets=distinct,
    )


def in_maximal_domain(frame: Frame, bias: BiasLike, x, tol: Tolerances = DEFAULT_TOLERANCES) -> bool:
    """Vrai si x appartient au domaine maximal K*_alpha (ensemble actif de rang n)."""
    return is_subframe(frame, active_set(frame, bias, x), tol)


def normalize(frame: Frame, bias: BiasLike) -> Tuple[Frame, np.ndarray, np.ndarray]:
    """
    Normalise la frame sur la sphère unité et le biais en conséquence.

    Returns:
        (frame normalisée, biais normalisé alpha_i / ||phi_i||, normes)
    """
    alpha = as_bias(frame, bias)
    norms = frame.norms
    return Frame(frame.vectors / norms[:, None]), alpha / norms, norms


def is_full_spark(
    frame: Frame,
    cap: int = DEFAULT_ENUMERATION_CAP,
    tol: Tolerances = DEFAULT_TOLERANCES,
) -> bool:
    """
    Vrai si tout sous-ensemble de n éléments est une base.

    Raises:
        EnumerationCapError: Si C(m, n) dépasse ``cap`` (question indécidée)
    """
    count = comb(frame.m, frame.n)
    if count > cap:
        raise EnumerationCapError(count, cap)
    subsets = combinations(range(frame.m), frame.n)
    while True:
        chunk = list(islice(subsets, 4096))
        if not chunk:
            return True
        stack = frame.vectors[np.array(chunk)]
        if not np.all(stacked_full_rank(stack, tol)):
            return False


def spark_rectifying_check(frame: Frame, spark: int, bias: BiasLike, samples) -> bool:
    """Condition suffisante : chaque ensemble actif compte au moins spark - 1 éléments."""
    alpha = as_bias(frame, bias)
    points = as_points(frame, samples)
    for start in range(0, points.shape[0], CHUNK_SIZE):
        counts = np.sum(points[start:start + CHUNK_SIZE] @ frame.vectors.T >= alpha, axis=1)
        if np.any(counts < spark - 1):
            return False
    return True


def perturbed_bias(bias: BiasLike, epsilon: float, M: float) -> np.ndarray:
    """Biais alpha - epsilon * M, valable pour une frame perturbée de moins de epsilon."""
    if epsilon < 0 or M < 0:
        raise ValueError(f"epsilon et M doivent être positifs (reçu {epsilon}, {M})")
    return np.asarray(bias, dtype=float) - epsilon * M


# --------------------------------------------------------------------------
# Témoins
# --------------------------------------------------------------------------

def redundancy_witness(
    frame: Frame,
    bias: BiasLike,
    rng: Optional[np.random.Generator] = None,
    attempts: int = 100,
    tol: Tolerances = DEFAULT_TOLERANCES,
) -> Optional[np.ndarray]:
    """
    Cherche un point t*y où moins de n éléments sont actifs.

    Pour une direction générique, l'un de y = +x ou y = -x a moins de n
    coefficients positifs dès que m < 2n ; au-delà de
    t* = max alpha_i / <y, phi_i> (coefficients négatifs), tous les
    coefficients négatifs sont inactifs.

    Returns:
        Le point témoin, ou None si aucune direction ne convient
    """
    alpha = as_bias(frame, bias)
    rng = rng if rng is not None else np.random.default_rng(0)
    for _ in range(attempts):
        direction = rng.standard_normal(frame.n)
        direction /= np.linalg.norm(direction)
        for y in (direction, -direction):
            coeffs = frame.vectors @ y
            if np.sum(coeffs > 0) >= frame.n:
                continue
            negative = coeffs < 0
            t_star = float(np.max(alpha[negative] / coeffs[negative])) if np.any(negative) else 0.0
            point = (2.0 * max(t_star, 0.0) + 1.0) * y
            if not in_maximal_domain(frame, alpha, point, tol):
                return point
    return None


def collision_pair(
    frame: Frame,
    bias: BiasLike,
    x,
    contains: Optional[Callable[[np.ndarray], bool]] = None,
    tol: Tolerances = DEFAULT_TOLERANCES,
) -> Optional[Tuple[np.ndarray, np.ndarray]]:
    """
    Construit deux points distincts de même sortie ReLU à partir de x.

    Si l'ensemble actif J de x n'est pas une frame, on se déplace selon un
    vecteur v orthogonal à Phi_J en restant sous le seuil pour les indices
    inactifs : les sorties actives sont inchangées, les autres restent nulles.

    Args:
        frame: Frame
        bias: Biais
        x: Point dont l'ensemble actif n'est pas une frame
        contains: Prédicat d'appartenance au domaine (optionnel)

    Returns:
        Couple (x1, x2) de points distincts, ou None
    """
    alpha = as_bias(frame, bias)
    x = as_vector(frame, x)
    active = list(active_set(frame, alpha, x))
    if is_subframe(frame, active, tol):
        return None

    direction = null_vector(frame.subset(active), frame.n, tol)
    coeffs = frame.vectors @ x
    inactive = np.setdiff1d(np.arange(frame.m), active)
    rates = np.abs(frame.vectors[inactive] @ direction)
    slack = alpha[inactive] - coeffs[inactive]
    moving = rates > 0
    t_max = float(np.min(slack[moving] / rates[moving])) if np.any(moving) else np.inf
    step = min(0.5 * t_max, max(1.0, float(np.linalg.norm(x))))
    if not step > 0:
        return None

    inside = contains if contains is not None else (lambda _p: True)
    for _ in range(60):
        for first, second in (
            (x - step * direction, x + step * direction),
            (x, x + step * direction),
            (x, x - step * direction),
        ):
            if inside(first) and inside(second):
                if np.allclose(relu_layer(frame, alpha, first), relu_layer(frame, alpha, second), rtol=0.0, atol=1e-12):
                    return first, second
        step *= 0.5
    return None
