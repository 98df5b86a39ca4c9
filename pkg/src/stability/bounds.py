"""
Bornes de stabilité empiriques d'une couche ReLU.

A_alpha et B_alpha sont les valeurs propres extrêmes des opérateurs de
frame des sous-frames actives rencontrées sur les échantillons ; ce sont
des estimations : un ensemble actif non échantillonné peut les dégrader.
"""

from dataclasses import dataclass, field
from typing import Any, Dict, NamedTuple, Optional

import numpy as np
from loguru import logger

from ..domains.domain import DomainSpec
from ..domains.sampling import sample
from ..frames.frame import BiasLike, Frame, IndexSet, as_bias, as_points, as_vector
from ..frames.numerics import DEFAULT_TOLERANCES, Tolerances, eigen_extremes, numerical_rank
from ..frames.operations import CHUNK_SIZE, active_set, analysis, relu_layer
from ..utils.errors import InvalidDomainError, NotAFrameError
from ..utils.io import to_jsonable

DEFAULT_STABILITY_SAMPLES = 10_000


class ReluFrameBounds(NamedTuple):
    lower: float
    upper: float
    distinct_active_sets: int
    worst_condition: float
    witness: Optional[np.ndarray]


class LocalStability(NamedTuple):
    """Constante A_J^-1 près de x0 ; ``strict`` si tous les indices de J sont strictement actifs."""
    constant: float
    strict: bool
    subset: IndexSet


class ImageBound(NamedTuple):
    radius: float
    checked_radius: float
    violations: int
    nonnegative: bool


@dataclass
class StabilityReport:
    A_alpha: float
    B_alpha: float
    samples: int
    distinct_active_sets: int
    worst_condition: float
    image_radius: float
    checked_radius: float
    image_violations: int = 0
    lipschitz_zero_bias: Optional[float] = None
    witness: Optional[np.ndarray] = None
    metadata: Dict[str, Any] = field(default_factory=dict)

    def to_dict(self) -> Dict[str, Any]:
        return to_jsonable({
            "A_alpha": self.A_alpha,
            "B_alpha": self.B_alpha,
            "samples": self.samples,
            "distinct_active_sets": self.distinct_active_sets,
            "worst_condition": self.worst_condition,
            "image_radius": self.image_radius,
            "checked_radius": self.checked_radius,
            "image_violations": self.image_violations,
            "lipschitz_zero_bias": self.lipschitz_zero_bias,
            "witness": self.witness,
            "metadata": self.metadata,
        })


def relu_frame_bounds(
    frame: Frame,
    bias: BiasLike,
    samples,
    tol: Tolerances = DEFAULT_TOLERANCES,
) -> ReluFrameBounds:
    """
    A_alpha = min et B_alpha = max des valeurs propres extrêmes de S_{I_x}.

    Un échantillon dont l'ensemble actif n'est pas une frame donne
    A_alpha = 0 et sert de témoin.

    Raises:
        ValueError: Ensemble d'échantillons vide
    """
    alpha = as_bias(frame, bias)
    points = as_points(frame, samples)
    if points.shape[0] == 0:
        raise ValueError("Aucun échantillon pour estimer les bornes")

    cache: Dict[bytes, tuple] = {}
    lower, upper, worst = np.inf, 0.0, 1.0
    witness = None
    for start in range(0, points.shape[0], CHUNK_SIZE):
        block = points[start:start + CHUNK_SIZE]
        patterns, first = np.unique(block @ frame.vectors.T >= alpha, axis=0, return_index=True)
        for pattern, k in zip(patterns, first):
            key = np.packbits(pattern).tobytes()
            if key not in cache:
                sub = frame.vectors[pattern]
                if numerical_rank(sub, tol) < frame.n:
                    cache[key] = (0.0, eigen_extremes(sub.T @ sub)[1] if sub.size else 0.0)
                else:
                    cache[key] = eigen_extremes(sub.T @ sub)
            low, high = cache[key]
            if low == 0.0 and witness is None:
                witness = block[k]
            lower, upper = min(lower, low), max(upper, high)
            worst = max(worst, high / low if low > 0 else np.inf)

    if witness is not None:
        logger.warning("Un ensemble actif échantillonné n'est pas une frame : A_alpha = 0")
    return ReluFrameBounds(float(max(lower, 0.0)), float(upper), len(cache), float(worst), witness)


def local_stability(frame: Frame, bias: BiasLike, x0, tol: Tolerances = DEFAULT_TOLERANCES) -> LocalStability:
    """
    Constante de stabilité locale A_J^-1 pour J = I_{x0}^alpha.

    Si une inégalité de J est une égalité, la constante ne vaut que pour les
    biais beta < alpha (``strict`` faux).

    Raises:
        NotAFrameError: Si l'ensemble actif en x0 n'est pas une frame
    """
    alpha = as_bias(frame, bias)
    x0 = as_vector(frame, x0)
    subset = active_set(frame, alpha, x0)
    sub = frame.subset(subset)
    if numerical_rank(sub, tol) < frame.n:
        raise NotAFrameError(f"L'ensemble actif {list(subset)} en x0 n'est pas une frame")
    lower, _ = eigen_extremes(sub.T @ sub)
    strict = bool(np.all(analysis(frame, x0)[list(subset)] > alpha[list(subset)]))
    return LocalStability(constant=1.0 / lower, strict=strict, subset=subset)


def image_ball_radius(
    frame: Frame,
    bias: BiasLike,
    domain: DomainSpec,
    samples=None,
    upper: Optional[float] = None,
    n_samples: int = DEFAULT_STABILITY_SAMPLES,
    seed: int = 0,
    tol: Tolerances = DEFAULT_TOLERANCES,
) -> ImageBound:
    """
    Rayon sqrt(B_alpha) M de la boule positive contenant l'image du domaine.

    Pour alpha >= 0 ce rayon est vérifié sur les échantillons ; sinon le
    rayon vérifié est sqrt(B_alpha) M + ||alpha^-||.

    Raises:
        InvalidDomainError: Domaine non borné
    """
    if not domain.is_bounded:
        raise InvalidDomainError(f"Le domaine {domain.variant.value} n'est pas borné")
    alpha = as_bias(frame, bias)
    points = as_points(frame, samples) if samples is not None else sample(domain, n_samples, seed).points
    if upper is None:
        upper = relu_frame_bounds(frame, alpha, points, tol).upper
    radius = float(np.sqrt(upper) * domain.sup_norm)
    checked = radius if np.all(alpha >= 0) else radius + float(np.linalg.norm(np.minimum(alpha, 0.0)))

    outputs = relu_layer(frame, alpha, points)
    norms = np.linalg.norm(outputs, axis=1)
    violations = int(np.sum(norms > checked * (1.0 + 1e-12)))
    if violations:
        logger.warning(f"{violations} sortie(s) hors de la boule de rayon {checked:.6g} (B_alpha sous-estimé ?)")
    return ImageBound(radius, checked, violations, bool(np.all(outputs >= 0)))


def stability_report(
    frame: Frame,
    bias: BiasLike,
    domain: DomainSpec,
    samples=None,
    n_samples: int = DEFAULT_STABILITY_SAMPLES,
    seed: int = 0,
    tol: Tolerances = DEFAULT_TOLERANCES,
) -> StabilityReport:
    """Rapport complet : bornes, ensembles actifs, rayon de l'image et constante 2m/A_alpha (alpha = 0)."""
    alpha = as_bias(frame, bias)
    points = as_points(frame, samples) if samples is not None else sample(domain, n_samples, seed).points
    bounds = relu_frame_bounds(frame, alpha, points, tol)
    image = image_ball_radius(frame, alpha, domain, points, bounds.upper, tol=tol)
    lipschitz = None
    if np.all(alpha == 0) and bounds.lower > 0:
        lipschitz = 2.0 * frame.m / bounds.lower
    logger.info(f"Stabilité : A_alpha={bounds.lower:.6g}, B_alpha={bounds.upper:.6g}, {bounds.distinct_active_sets} ensemble(s) actif(s)")
    return StabilityReport(
        A_alpha=bounds.lower,
        B_alpha=bounds.upper,
        samples=points.shape[0],
        distinct_active_sets=bounds.distinct_active_sets,
        worst_condition=bounds.worst_condition,
        image_radius=image.radius,
        checked_radius=image.checked_radius,
        image_violations=image.violations,
        lipschitz_zero_bias=lipschitz,
        witness=bounds.witness,
        metadata={"domain": domain.to_dict(), "seed": seed if samples is None else None},
    )
