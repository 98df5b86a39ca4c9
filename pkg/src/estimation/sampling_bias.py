"""
Estimation du biais maximal par échantillonnage (approche A).

Chaque échantillon x met à jour, pour les indices i de sa base la plus
corrélée J*(x), alpha_i <- min(alpha_i, <x, phi_i>). Le minimum étant
associatif, les lots d'échantillons sont traités en parallèle puis
fusionnés sans changer le résultat.

Pour la boule, la sphère, le donut et la boule positive, une direction
unitaire u représente tout le segment {t u : s <= t <= r} (J* est
invariant par homothétie positive) : la mise à jour utilise l'infimum
sur le segment, r <u, phi_i> si le coefficient est négatif et
s <u, phi_i> sinon.
"""

from concurrent.futures import ThreadPoolExecutor
from typing import Callable, Iterable, List, Optional, Tuple, Union

import numpy as np
from loguru import logger

from ..domains.covering import DEFAULT_COVERING_FACTOR, covering_radius_proxy
from ..domains.domain import DomainSpec, Variant
from ..domains.sampling import GENERATOR_ID, RadialProfile, SampleSequence, radial_profile, sample_stream, take
from ..frames.frame import Frame, as_bias
from ..frames.numerics import DEFAULT_ENUMERATION_CAP, DEFAULT_TOLERANCES, Tolerances
from ..frames.operations import CHUNK_SIZE, is_full_spark, most_correlated_basis, top_n_bases
from ..utils.config import worker_count
from ..utils.errors import DimensionError, MethodInfeasibleError
from .results import BiasEstimate, EstimationMethod

InitLike = Union[str, np.ndarray, List[float]]

BasisSelector = Callable[[np.ndarray, np.ndarray], np.ndarray]


# --------------------------------------------------------------------------
# Sélection des bases et mise à jour
# --------------------------------------------------------------------------

def basis_selector(
    frame: Frame,
    assume_full_spark: bool = False,
    allow_non_full_spark: bool = False,
    cap: int = DEFAULT_ENUMERATION_CAP,
    tol: Tolerances = DEFAULT_TOLERANCES,
) -> BasisSelector:
    """
    Fonction (coefficients, points) -> indices (N, n) des bases J*(x).

    Pour une frame full-spark, les n plus grands coefficients ; sinon,
    si ``allow_non_full_spark``, la sélection gloutonne exacte point par
    point.

    Raises:
        MethodInfeasibleError: Frame non full-spark sans dérogation
        EnumerationCapError: Test full-spark indécidable sous le plafond
    """
    if assume_full_spark or is_full_spark(frame, cap=cap, tol=tol):
        return lambda coeffs, _points: top_n_bases(coeffs, frame.n)
    if not allow_non_full_spark:
        raise MethodInfeasibleError(
            "La frame n'est pas full-spark",
            hint="perturber légèrement la frame ou autoriser la sélection gloutonne des bases",
        )
    logger.warning("Frame non full-spark : sélection gloutonne des bases point par point")

    def greedy(_coeffs: np.ndarray, points: np.ndarray) -> np.ndarray:
        return np.array([most_correlated_basis(frame, x, tol=tol).indices for x in points], dtype=int)

    return greedy


def basis_min_update(
    alpha: np.ndarray,
    coeffs: np.ndarray,
    bases: np.ndarray,
    profile: Optional[RadialProfile] = None,
) -> np.ndarray:
    """
    Mise à jour en place alpha_i <- min(alpha_i, <x, phi_i>) pour i dans J*(x).

    Args:
        alpha: Biais courant (m,), modifié en place
        coeffs: Coefficients (N, m) des échantillons (ou des directions)
        bases: Indices (N, n) des bases sélectionnées
        profile: Segment radial porté par chaque direction (None : points)
    """
    selected = np.take_along_axis(coeffs, bases, axis=1)
    if profile is not None:
        selected = np.where(selected < 0, profile.outer * selected, profile.inner * selected)
    np.minimum.at(alpha, bases.ravel(), selected.ravel())
    return alpha


def _block_minimum(frame: Frame, block: np.ndarray, selector: BasisSelector, profile) -> np.ndarray:
    local = np.full(frame.m, np.inf)
    coeffs = block @ frame.vectors.T
    return basis_min_update(local, coeffs, selector(coeffs, block), profile)


def reduce_samples(
    frame: Frame,
    points: np.ndarray,
    selector: BasisSelector,
    profile: Optional[RadialProfile] = None,
    workers: int = 1,
) -> np.ndarray:
    """Minimum par coordonnée sur un ensemble d'échantillons, par lots fusionnés."""
    blocks = [points[start:start + CHUNK_SIZE] for start in range(0, points.shape[0], CHUNK_SIZE)]
    if not blocks:
        return np.full(frame.m, np.inf)
    if workers > 1 and len(blocks) > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            partials = list(pool.map(lambda b: _block_minimum(frame, b, selector, profile), blocks))
    else:
        partials = [_block_minimum(frame, b, selector, profile) for b in blocks]
    return np.min(np.stack(partials), axis=0)


# --------------------------------------------------------------------------
# Échantillons et initialisation
# --------------------------------------------------------------------------

def check_dimensions(frame: Frame, domain: DomainSpec) -> None:
    if frame.n != domain.n:
        raise DimensionError(f"Frame de dimension {frame.n}, domaine de dimension {domain.n}")


def _uses_radial(domain: DomainSpec, radial: bool, gaussian: bool) -> Optional[RadialProfile]:
    return radial_profile(domain) if radial and not gaussian else None


def estimation_stream(domain: DomainSpec, seed: int, radial: bool = True, gaussian: bool = False):
    """Flux des échantillons (ou directions radiales) utilisés par l'estimation."""
    profile = _uses_radial(domain, radial, gaussian)
    return sample_stream(domain, seed, gaussian=gaussian, directions=profile is not None), profile


def _draw(domain: DomainSpec, N: int, seed: int, radial: bool, gaussian: bool):
    """N échantillons (ou directions) et le profil radial ; le nuage entier si N est sa taille."""
    if domain.variant == Variant.SAMPLE_CLOUD and N == domain.points.shape[0]:
        return np.asarray(domain.points), None
    stream, profile = estimation_stream(domain, seed, radial, gaussian)
    return take(stream, N, domain.n), profile


def estimation_samples(
    domain: DomainSpec,
    N: int,
    seed: int,
    radial: bool = True,
    gaussian: bool = False,
) -> SampleSequence:
    """
    Points du domaine représentés par une estimation.

    Avec la réduction radiale, la direction u est enregistrée comme le
    point extérieur r u de son segment.
    """
    points, profile = _draw(domain, N, seed, radial, gaussian)
    if profile is not None:
        points = profile.outer * points
    return SampleSequence(points, seed, domain=domain)


def initial_bias(
    frame: Frame,
    domain: DomainSpec,
    init: InitLike,
    selector: BasisSelector,
) -> np.ndarray:
    """
    Biais initial alpha^(0).

    "inf" : +inf partout ; "auto" : passe sur les éléments de la frame qui
    appartiennent au domaine ; "pbe" : estimation polytopale ; sinon un
    vecteur explicite.
    """
    check_dimensions(frame, domain)
    if isinstance(init, str):
        if init == "inf":
            return np.full(frame.m, np.inf)
        if init == "auto":
            alpha = np.full(frame.m, np.inf)
            inside = frame.vectors[domain.contains_batch(frame.vectors)]
            if inside.shape[0]:
                coeffs = inside @ frame.vectors.T
                basis_min_update(alpha, coeffs, selector(coeffs, inside))
            logger.debug(f"Initialisation par {inside.shape[0]} élément(s) de la frame")
            return alpha
        if init == "pbe":
            from .polytope_bias import pbe_for_domain

            return pbe_for_domain(frame, domain).values.copy()
        raise ValueError(f"Initialisation inconnue: {init!r} (auto, inf, pbe ou vecteur)")
    return as_bias(frame, init).copy()


def _describe_init(init: InitLike) -> str:
    return init if isinstance(init, str) else "explicit"


def _correction(frame: Frame, N: int, factor: float, apply: bool) -> Tuple[float, Optional[np.ndarray]]:
    if not apply or N < 2 or factor == 0:
        return 0.0, None
    weights = None if np.allclose(frame.norms, 1.0, rtol=0.0, atol=1e-12) else frame.norms
    return covering_radius_proxy(frame.n, N, factor), weights


# --------------------------------------------------------------------------
# Estimateurs
# --------------------------------------------------------------------------

def sampling_bias_estimate(
    frame: Frame,
    domain: DomainSpec,
    N: int,
    seed: int,
    init: InitLike = "auto",
    radial: bool = True,
    gaussian: bool = False,
    correction_factor: float = DEFAULT_COVERING_FACTOR,
    apply_correction: bool = True,
    assume_full_spark: bool = False,
    allow_non_full_spark: bool = False,
    cap: int = DEFAULT_ENUMERATION_CAP,
    tol: Tolerances = DEFAULT_TOLERANCES,
    workers: Optional[int] = None,
) -> BiasEstimate:
    """
    Approximation alpha^(N) du biais maximal par N échantillons.

    La frame est alpha^(N)-rectifiante sur les échantillons ; le terme
    correctif rho*(n, N) (multiplié par les normes pour une frame non
    normalisée) est porté par ``correction``.

    Args:
        frame: Frame (normalisée de préférence)
        domain: Domaine échantillonnable
        N: Nombre d'échantillons après l'initialisation
        seed: Graine
        init: "auto", "inf", "pbe" ou vecteur initial
        radial: Réduction radiale pour les domaines à symétrie radiale
        gaussian: Échantillons gaussiens (espace entier)
        correction_factor: Facteur du terme correctif
        apply_correction: Renseigne ``correction`` (sinon 0)
        assume_full_spark: Ne pas vérifier la propriété full-spark
        allow_non_full_spark: Sélection gloutonne pour une frame non full-spark
        workers: Nombre de threads (RELU_CERTIFY_THREADS par défaut)

    Returns:
        BiasEstimate de méthode "sampling"
    """
    if N < 0:
        raise ValueError(f"Nombre d'échantillons négatif: {N}")
    selector = basis_selector(frame, assume_full_spark, allow_non_full_spark, cap, tol)
    alpha = initial_bias(frame, domain, init, selector)

    points, profile = _draw(domain, N, seed, radial, gaussian)
    block_min = reduce_samples(frame, points, selector, profile, workers or worker_count())
    alpha = np.minimum(alpha, block_min)

    correction, weights = _correction(frame, N, correction_factor, apply_correction)
    never = int(np.sum(np.isinf(alpha)))
    if never:
        logger.warning(f"{never} coordonnée(s) jamais mise(s) à jour (valeur +inf)")
    logger.info(f"Estimation par échantillonnage : N={N}, min(alpha)={np.min(alpha):.6g}, correction={correction:.3g}")
    return BiasEstimate(
        values=alpha,
        method=EstimationMethod.SAMPLING,
        correction=correction,
        weights=weights,
        metadata={
            "seed": seed,
            "N": N,
            "iterations": N,
            "generator": GENERATOR_ID,
            "domain": domain.to_dict(),
            "init": _describe_init(init),
            "radial": profile is not None,
            "gaussian": gaussian,
            "correction_factor": correction_factor,
            "tolerances": tol.to_dict(),
        },
    )


def _change(new: np.ndarray, old: np.ndarray) -> float:
    """Norme euclidienne de new - old, avec inf - inf = 0."""
    both_inf = np.isinf(new) & np.isinf(old) & (np.sign(new) == np.sign(old))
    diff = np.where(both_inf, 0.0, new - old)
    return float(np.linalg.norm(diff))


def stopping_variant(
    frame: Frame,
    domain: DomainSpec,
    epsilon: float,
    steps: int,
    seed: int,
    max_N: int,
    init: InitLike = "auto",
    radial: bool = True,
    gaussian: bool = False,
    correction_factor: float = DEFAULT_COVERING_FACTOR,
    assume_full_spark: bool = False,
    allow_non_full_spark: bool = False,
    cap: int = DEFAULT_ENUMERATION_CAP,
    tol: Tolerances = DEFAULT_TOLERANCES,
) -> BiasEstimate:
    """
    Variante à arrêt : fenêtres de ``steps`` échantillons tant que
    ||alpha^(k+steps) - alpha^(k)|| > epsilon, au plus ``max_N`` échantillons.

    epsilon = 0 désactive l'arrêt anticipé.

    Raises:
        ValueError: epsilon < 0 ou steps < 1
    """
    if epsilon < 0:
        raise ValueError(f"epsilon doit être positif (reçu {epsilon})")
    if steps < 1:
        raise ValueError(f"steps doit être >= 1 (reçu {steps})")
    selector = basis_selector(frame, assume_full_spark, allow_non_full_spark, cap, tol)
    alpha = initial_bias(frame, domain, init, selector)
    stream, profile = estimation_stream(domain, seed, radial, gaussian)

    used = 0
    converged = False
    while used < max_N:
        window = min(steps, max_N - used)
        points = take(stream, window, domain.n)
        updated = np.minimum(alpha, reduce_samples(frame, points, selector, profile))
        change = _change(updated, alpha)
        alpha = updated
        used += window
        if epsilon > 0 and change <= epsilon:
            converged = True
            break

    correction, weights = _correction(frame, used, correction_factor, True)
    logger.info(f"Variante à arrêt : {used} itération(s), convergée={converged}")
    return BiasEstimate(
        values=alpha,
        method=EstimationMethod.SAMPLING,
        correction=correction,
        weights=weights,
        metadata={
            "seed": seed,
            "N": used,
            "iterations": used,
            "generator": GENERATOR_ID,
            "domain": domain.to_dict(),
            "init": _describe_init(init),
            "radial": profile is not None,
            "epsilon": epsilon,
            "steps": steps,
            "max_N": max_N,
            "converged": converged,
        },
    )


def bias_trajectory(
    frame: Frame,
    domain: DomainSpec,
    checkpoints: Iterable[int],
    seed: int,
    init: InitLike = "auto",
    radial: bool = True,
    gaussian: bool = False,
    assume_full_spark: bool = False,
    cap: int = DEFAULT_ENUMERATION_CAP,
    tol: Tolerances = DEFAULT_TOLERANCES,
) -> List[Tuple[int, np.ndarray]]:
    """
    Biais alpha^(k) aux itérations demandées (k = 0 : après l'initialisation).

    Les échantillons sont ceux de sampling_bias_estimate avec la même graine.
    """
    ks = sorted({int(k) for k in checkpoints})
    if ks and ks[0] < 0:
        raise ValueError("Les points de contrôle doivent être positifs")
    selector = basis_selector(frame, assume_full_spark, False, cap, tol)
    alpha = initial_bias(frame, domain, init, selector)
    stream, profile = estimation_stream(domain, seed, radial, gaussian)
    points = take(stream, ks[-1] if ks else 0, domain.n)

    trajectory = []
    done = 0
    for k in ks:
        if k > done:
            alpha = np.minimum(alpha, reduce_samples(frame, points[done:k], selector, profile))
            done = k
        trajectory.append((k, alpha.copy()))
    return trajectory


def constant_bias_estimate(
    frame: Frame,
    domain: DomainSpec,
    N: int,
    seed: int,
    radial: bool = True,
    gaussian: bool = False,
    cap: int = DEFAULT_ENUMERATION_CAP,
    tol: Tolerances = DEFAULT_TOLERANCES,
) -> float:
    """
    Approximation par au-dessus du biais constant maximal :
    min sur les échantillons de min_{j in J*(x)} <x, phi_j>.

    Les frames non full-spark utilisent la sélection gloutonne exacte.
    """
    check_dimensions(frame, domain)
    selector = basis_selector(frame, allow_non_full_spark=True, cap=cap, tol=tol)
    if N == 0:
        return float("inf")
    points, profile = _draw(domain, N, seed, radial, gaussian)

    value = np.inf
    for start in range(0, points.shape[0], CHUNK_SIZE):
        block = points[start:start + CHUNK_SIZE]
        coeffs = block @ frame.vectors.T
        selected = np.take_along_axis(coeffs, selector(coeffs, block), axis=1)
        lowest = np.min(selected, axis=1)
        if profile is not None:
            lowest = np.where(lowest < 0, profile.outer * lowest, profile.inner * lowest)
        value = min(value, float(np.min(lowest)))
    logger.info(f"Biais constant estimé : {value:.6g} (N={N})")
    return value
