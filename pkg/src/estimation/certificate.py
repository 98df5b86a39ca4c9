"""
Comparaison d'un biais donné à une estimation du biais maximal.
"""

from typing import Optional, Tuple

import numpy as np
from loguru import logger

from ..domains.domain import DomainSpec, Variant
from ..domains.sampling import sample
from ..frames.frame import Frame, as_bias
from ..frames.numerics import DEFAULT_TOLERANCES, Tolerances
from ..frames.operations import collision_pair, maximal_domain_mask, relu_layer
from ..utils.errors import DimensionError, InvalidDomainError
from .results import BiasEstimate, Certificate, Verdict, Witness

DEFAULT_WITNESS_SAMPLES = 20_000


def _candidate_points(frame: Frame, domain: DomainSpec, count: int, seed: int) -> np.ndarray:
    """Points du domaine examinés lors de la recherche de témoin."""
    try:
        points = sample(domain, count, seed).points
    except InvalidDomainError:
        # Domaines non bornés : nuage gaussien élargi, filtré par appartenance
        scale = 2.0 * domain.s if domain.variant == Variant.BALL_COMPLEMENT else 1.0
        cloud = sample(DomainSpec.full_space(frame.n), count, seed, gaussian=True).points * scale
        points = cloud[domain.contains_batch(cloud)]
    radius = domain.sup_norm if domain.is_bounded else 1.0
    directions = np.vstack([frame.vectors, -frame.vectors]) / np.concatenate([frame.norms, frame.norms])[:, None]
    extra = directions * radius
    extra = extra[domain.contains_batch(extra)]
    return np.vstack([extra, points]) if extra.size else points


def find_witness(
    frame: Frame,
    bias,
    domain: DomainSpec,
    samples: int = DEFAULT_WITNESS_SAMPLES,
    seed: int = 0,
    tol: Tolerances = DEFAULT_TOLERANCES,
) -> Optional[Witness]:
    """
    Cherche deux entrées du domaine ayant la même sortie ReLU.

    Les points hors du domaine maximal (ensemble actif sans frame) servent
    de départ à la construction d'une paire de collision.

    Returns:
        Witness, ou None si aucun témoin n'est trouvé
    """
    alpha = as_bias(frame, bias)
    points = _candidate_points(frame, domain, samples, seed)
    if points.shape[0] == 0:
        return None
    outside = np.flatnonzero(~maximal_domain_mask(frame, alpha, points, tol))
    logger.debug(f"Recherche de témoin : {outside.size} point(s) hors du domaine maximal")
    for k in outside[:200]:
        pair = collision_pair(frame, alpha, points[k], contains=domain.contains, tol=tol)
        if pair is not None:
            first, second = pair
            return Witness(first=first, second=second, output=relu_layer(frame, alpha, first))
    return None


def never_updated_indices(estimate: BiasEstimate) -> Tuple[int, ...]:
    """Coordonnées restées à +inf sans être déclarées libres."""
    free = set(estimate.free_indices)
    stale = tuple(int(i) for i in np.flatnonzero(np.isposinf(estimate.values)) if int(i) not in free)
    if stale:
        logger.warning(f"Coordonnées jamais mises à jour par l'estimation : {list(stale)}")
    return stale


def certify(
    frame: Frame,
    given_bias,
    estimate: BiasEstimate,
    domain: Optional[DomainSpec] = None,
    witness_samples: int = DEFAULT_WITNESS_SAMPLES,
    seed: int = 0,
    tol: Tolerances = DEFAULT_TOLERANCES,
) -> Certificate:
    """
    Verdict d'injectivité de la couche ReLU de biais ``given_bias``.

    La marge est ``estimate.values - given_bias`` ; le verdict est
    injectif si la marge dépasse la correction sur chaque coordonnée (les
    indices libres passent toujours). Pour une estimation par
    échantillonnage, une marge positive mais inférieure à la correction
    donne "unknown". Une marge négative déclenche la recherche d'un
    témoin de non-injectivité sur ``domain`` : "not_injective" s'il est
    trouvé, "unknown" sinon.

    Raises:
        DimensionError: Longueurs de biais incompatibles
    """
    alpha = as_bias(frame, given_bias)
    if estimate.m != frame.m:
        raise DimensionError(f"L'estimation a {estimate.m} coordonnées, la frame {frame.m}")

    with np.errstate(invalid="ignore"):
        margin = estimate.values - alpha
    margin[list(estimate.free_indices)] = np.inf
    margin = np.where(np.isnan(margin), np.inf, margin)
    required = estimate.correction_vector

    failing = tuple(int(i) for i in np.flatnonzero(margin < 0))
    banded = tuple(int(i) for i in np.flatnonzero((margin >= 0) & (margin < required)))
    flagged = set(estimate.flagged_indices) | set(never_updated_indices(estimate))
    metadata = {
        "estimate": estimate.metadata,
        "correction": estimate.correction,
        "flagged_indices": sorted(int(i) for i in flagged),
        "free_indices": list(estimate.free_indices),
        "tolerances": tol.to_dict(),
    }

    witness = None
    if failing:
        if domain is not None:
            witness = find_witness(frame, alpha, domain, witness_samples, seed, tol)
            metadata["witness_search"] = {"samples": witness_samples, "seed": seed, "domain": domain.to_dict()}
        verdict = Verdict.NOT_INJECTIVE if witness is not None else Verdict.UNKNOWN
    elif banded:
        verdict = Verdict.UNKNOWN
        failing = banded
    else:
        verdict = Verdict.INJECTIVE

    logger.info(f"Certificat : {verdict.value} (marge minimale {np.min(margin):.6g})")
    return Certificate(
        verdict=verdict,
        margin=margin,
        method=estimate.method,
        failing_indices=failing,
        witness=witness,
        metadata=metadata,
    )
