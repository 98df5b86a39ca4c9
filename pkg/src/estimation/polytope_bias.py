"""
Estimation polytopale du biais (approche B).

Le domaine est découpé par les cônes des facettes du polytope inscrit :
sur le cône de la facette F_j, seuls les sommets de F_j doivent rester
actifs. On calcule donc, pour chaque i, l'infimum de <x, phi_i> sur les
cônes des facettes contenant phi_i, intersectés avec le domaine.
"""

from typing import Any, Dict, List, Optional, Tuple

import numpy as np
from loguru import logger
from scipy.optimize import linprog, nnls

from ..domains.domain import DomainSpec, Variant
from ..domains.sampling import SAMPLE_CHUNK, sample_stream
from ..frames.frame import Frame
from ..frames.numerics import DEFAULT_ENUMERATION_CAP, DEFAULT_TOLERANCES, Tolerances
from ..polytope.facets import FacetStructure, assign_facets, enumerate_facets
from ..polytope.omnidirectional import is_omnidirectional
from ..utils.errors import DegenerateHullError, InvalidDomainError, MethodInfeasibleError
from .results import BiasEstimate, EstimationMethod

DEFAULT_SOLVER_ITERATIONS = 10_000
DEFAULT_DENSE_SAMPLES = 100_000


# --------------------------------------------------------------------------
# Préconditions
# --------------------------------------------------------------------------

def prepare_facets(
    frame: Frame,
    fs: Optional[FacetStructure] = None,
    cap: int = DEFAULT_ENUMERATION_CAP,
    tol: Tolerances = DEFAULT_TOLERANCES,
) -> FacetStructure:
    """
    Vérifie les hypothèses de l'approche polytopale et renvoie les facettes.

    Raises:
        MethodInfeasibleError: Frame non normalisée ou non omnidirectionnelle
        EnumerationCapError: Énumération des facettes au-delà du plafond
    """
    if not np.allclose(frame.norms, 1.0, rtol=0.0, atol=1e-9):
        raise MethodInfeasibleError(
            "L'estimation polytopale exige une frame normalisée",
            hint="normaliser la frame et le biais (normalize)",
        )
    try:
        fs = fs if fs is not None else enumerate_facets(frame, cap=cap, tol=tol)
    except DegenerateHullError as e:
        raise MethodInfeasibleError(
            f"La frame n'est pas omnidirectionnelle ({e})",
            hint="ajouter un vecteur avec make_omnidirectional",
        ) from e
    if not is_omnidirectional(frame, fs, tol=tol):
        raise MethodInfeasibleError(
            "La frame n'est pas omnidirectionnelle : l'origine n'est pas intérieure au polytope inscrit",
            hint="ajouter un vecteur avec make_omnidirectional",
        )
    return fs


def _facet_metadata(fs: FacetStructure) -> Dict[str, Any]:
    return {"facets": len(fs), "simplicial": fs.simplicial}


# --------------------------------------------------------------------------
# (i) Bord du polytope
# --------------------------------------------------------------------------

def _boundary_values(frame: Frame, fs: FacetStructure) -> Tuple[np.ndarray, List[Optional[int]]]:
    """min sur les facettes j contenant i et leurs sommets l de <phi_l, phi_i>, avec l'argmin."""
    gram = frame.vectors @ frame.vectors.T
    values = np.full(frame.m, np.inf)
    argmin: List[Optional[int]] = [None] * frame.m
    for facet in fs.facets:
        vertices = list(facet.vertices)
        block = gram[np.ix_(vertices, vertices)]
        for row, i in enumerate(vertices):
            col = int(np.argmin(block[row]))
            if block[row, col] < values[i]:
                values[i] = block[row, col]
                argmin[i] = vertices[col]
    return values, argmin


def pbe_boundary(
    frame: Frame,
    fs: Optional[FacetStructure] = None,
    cap: int = DEFAULT_ENUMERATION_CAP,
    tol: Tolerances = DEFAULT_TOLERANCES,
) -> BiasEstimate:
    """
    Biais alpha_Phi^Delta pour le bord du polytope inscrit.

    (alpha_Phi^Delta)_i = min sur les facettes j contenant i et leurs
    sommets l de <phi_l, phi_i>.
    """
    fs = prepare_facets(frame, fs, cap, tol)
    values, argmin = _boundary_values(frame, fs)
    logger.info(f"Estimation polytopale (bord) : min = {np.min(values):.6g}")
    return BiasEstimate(
        values=values,
        method=EstimationMethod.PBE_BOUNDARY,
        metadata={
            **_facet_metadata(fs),
            "domain": DomainSpec.polytope_boundary(frame).to_dict()["variant"],
            "witnesses": [frame.vectors[k] if k is not None else None for k in argmin],
        },
    )


# --------------------------------------------------------------------------
# (ii) Sphère
# --------------------------------------------------------------------------

def project_cone_ball(vertices: np.ndarray, y: np.ndarray) -> np.ndarray:
    """
    Projection sur cone(vertices) inter boule unité.

    Projection sur le cône par moindres carrés positifs, puis retour dans
    la boule : pour un cône convexe fermé, c'est la projection exacte sur
    l'intersection.
    """
    coefficients, _ = nnls(vertices.T, y)
    projected = vertices.T @ coefficients
    norm = np.linalg.norm(projected)
    return projected / norm if norm > 1.0 else projected


def cap_minimum(
    vertices: np.ndarray,
    phi: np.ndarray,
    max_iter: int = DEFAULT_SOLVER_ITERATIONS,
    tol: float = DEFAULT_TOLERANCES.solver,
) -> Tuple[np.ndarray, int, bool]:
    """
    min <x, phi> sur cone(vertices) avec ||x|| <= 1, par gradient projeté.

    Pas 1/L avec L = ||D||^2 ; départ au barycentre normalisé de la facette.

    Returns:
        (minimiseur, itérations, convergence)
    """
    step = 1.0 / max(np.linalg.norm(vertices, 2) ** 2, 1e-12)
    x = vertices.mean(axis=0)
    x = x / np.linalg.norm(x)
    for iteration in range(1, max_iter + 1):
        following = project_cone_ball(vertices, x - step * phi)
        if np.linalg.norm(following - x) <= tol:
            return following, iteration, True
        x = following
    return x, max_iter, False


def _dense_cap_points(vertices: np.ndarray, count: int, rng: np.random.Generator) -> np.ndarray:
    """Points du cône de la facette projetés sur la sphère (combinaisons de Dirichlet)."""
    weights = rng.dirichlet(np.ones(vertices.shape[0]), size=count)
    points = weights @ vertices
    return np.vstack([vertices, points / np.linalg.norm(points, axis=1, keepdims=True)])


def pbe_sphere(
    frame: Frame,
    fs: Optional[FacetStructure] = None,
    max_iter: int = DEFAULT_SOLVER_ITERATIONS,
    dense_samples: int = DEFAULT_DENSE_SAMPLES,
    seed: int = 0,
    cap: int = DEFAULT_ENUMERATION_CAP,
    tol: Tolerances = DEFAULT_TOLERANCES,
) -> BiasEstimate:
    """
    Biais alpha_S^Delta pour la sphère unité.

    Si (alpha_Phi^Delta)_i >= 0, c'est la valeur retenue. Sinon, pour
    chaque facette j contenant i, on minimise <x, phi_i> sur le cône de
    F_j intersecté avec la boule (relaxation convexe de la calotte), et on
    compare à un échantillonnage dense de la calotte ; la plus petite valeur
    est retenue, puis le minimum avec (alpha_Phi^Delta)_i.

    Une coordonnée dont le solveur n'a pas convergé est signalée et
    abaissée à (échantillonnage dense - tol.solver).
    """
    fs = prepare_facets(frame, fs, cap, tol)
    boundary, argmin = _boundary_values(frame, fs)
    values = boundary.copy()
    witnesses: List[Optional[np.ndarray]] = [frame.vectors[k] if k is not None else None for k in argmin]
    flagged = set()
    max_iterations = 0

    needed = [j for j, facet in enumerate(fs.facets) if any(boundary[i] < 0 for i in facet.vertices)]
    children = np.random.SeedSequence(seed).spawn(max(1, len(needed)))
    for child, j in zip(children, needed):
        vertices = frame.vectors[list(fs.facets[j].vertices)]
        dense = _dense_cap_points(vertices, dense_samples, np.random.Generator(np.random.Philox(child)))
        for i in fs.facets[j].vertices:
            if boundary[i] >= 0:
                continue
            phi = frame.vectors[i]
            x, iterations, converged = cap_minimum(vertices, phi, max_iter, tol.solver)
            max_iterations = max(max_iterations, iterations)
            dense_values = dense @ phi
            k = int(np.argmin(dense_values))
            candidate, point = (float(x @ phi), x) if x @ phi <= dense_values[k] else (float(dense_values[k]), dense[k])
            if not converged:
                logger.warning(f"Solveur non convergé (coordonnée {i}, facette {j}) : repli sur l'échantillonnage dense")
                flagged.add(i)
                candidate = min(candidate, float(dense_values[k]) - tol.solver)
            if candidate < values[i]:
                values[i] = candidate
                witnesses[i] = point

    logger.info(f"Estimation polytopale (sphère) : min = {np.min(values):.6g}, {len(needed)} calotte(s) résolue(s)")
    return BiasEstimate(
        values=values,
        method=EstimationMethod.PBE_SPHERE,
        flagged_indices=tuple(sorted(flagged)),
        metadata={
            **_facet_metadata(fs),
            "domain": "sphere",
            "solver_iterations": max_iterations,
            "dense_samples": dense_samples,
            "seed": seed,
            "witnesses": witnesses,
        },
    )


def dense_sphere_bias(
    frame: Frame,
    fs: Optional[FacetStructure] = None,
    samples: int = 1_000_000,
    seed: int = 0,
    tol: Tolerances = DEFAULT_TOLERANCES,
) -> np.ndarray:
    """
    Oracle par balayage de la sphère : pour chaque point x, facette j de
    son cône, et pour chaque sommet i de F_j, candidat <x, phi_i>.

    Donne une approximation par au-dessus de alpha_S^Delta.
    """
    fs = prepare_facets(frame, fs, tol=tol)
    values = np.full(frame.m, np.inf)
    stream = sample_stream(DomainSpec.sphere(frame.n), seed)
    remaining = samples
    blocks = [frame.vectors]
    while remaining > 0:
        blocks.append(next(stream)[:remaining])
        remaining -= SAMPLE_CHUNK
    for block in blocks:
        ids, _ = assign_facets(fs, block, tol)
        coeffs = block @ frame.vectors.T
        for j in np.unique(ids):
            rows = coeffs[ids == j]
            vertices = list(fs.facets[j].vertices)
            values[vertices] = np.minimum(values[vertices], rows[:, vertices].min(axis=0))
    return values


# --------------------------------------------------------------------------
# (iii) Donut et boule, (iv) boule positive, (v) complémentaire de boule
# --------------------------------------------------------------------------

def _radial_scaling(values: np.ndarray, r: float, s: float) -> np.ndarray:
    """Infimum sur le segment [s, r] : r v si v < 0, s v sinon."""
    return np.where(values < 0, r * values, s * values)


def pbe_donut(
    frame: Frame,
    r: float,
    s: float = 0.0,
    fs: Optional[FacetStructure] = None,
    sphere: Optional[BiasEstimate] = None,
    **kwargs,
) -> BiasEstimate:
    """
    Biais pour le donut D_{r,s} (la boule fermée B_r pour s = 0).

    Chaque coordonnée de alpha_S^Delta est mise à l'échelle par r si elle
    est négative, par s sinon.

    Raises:
        InvalidDomainError: Si la condition 0 <= s < r n'est pas remplie
    """
    if not (r > 0 and 0 <= s < r):
        raise InvalidDomainError(f"Rayons invalides pour le donut : r={r}, s={s}")
    sphere = sphere if sphere is not None else pbe_sphere(frame, fs, **kwargs)
    values = _radial_scaling(sphere.values, r, s)
    return BiasEstimate(
        values=values,
        method=EstimationMethod.PBE_DONUT,
        flagged_indices=sphere.flagged_indices,
        metadata={**sphere.metadata, "domain": "donut", "r": r, "s": s},
    )


def _meets_nonneg_orthant(vertices: np.ndarray) -> bool:
    """Faisabilité de c >= 0, sum c = 1, D c >= 0 (programme linéaire)."""
    k, n = vertices.shape
    res = linprog(
        np.zeros(k),
        A_ub=-vertices.T,
        b_ub=np.zeros(n),
        A_eq=np.ones((1, k)),
        b_eq=np.ones(1),
        bounds=[(0.0, None)] * k,
        method="highs",
    )
    return res.status == 0


def nonneg_active_indices(frame: Frame, fs: FacetStructure) -> Tuple[Tuple[int, ...], Tuple[int, ...]]:
    """
    Facettes dont le cône rencontre l'orthant positif.

    Returns:
        (facettes J+, sommets I+)
    """
    facets = tuple(j for j, facet in enumerate(fs.facets) if _meets_nonneg_orthant(frame.vectors[list(facet.vertices)]))
    indices = tuple(sorted({i for j in facets for i in fs.facets[j].vertices}))
    return facets, indices


def pbe_nonneg_ball(
    frame: Frame,
    r: float = 1.0,
    fs: Optional[FacetStructure] = None,
    sphere: Optional[BiasEstimate] = None,
    cap: int = DEFAULT_ENUMERATION_CAP,
    tol: Tolerances = DEFAULT_TOLERANCES,
    **kwargs,
) -> BiasEstimate:
    """
    Biais pour la boule positive B_r^+.

    Seules les facettes dont le cône rencontre l'orthant positif
    comptent ; leurs sommets I+ reçoivent la valeur de la boule, les autres
    indices sont libres (valeur +inf, listés dans ``free_indices``).
    """
    if not r > 0:
        raise InvalidDomainError(f"Rayon invalide: {r}")
    fs = prepare_facets(frame, fs, cap, tol)
    facets, active = nonneg_active_indices(frame, fs)
    sphere = sphere if sphere is not None else pbe_sphere(frame, fs, cap=cap, tol=tol, **kwargs)
    values = np.full(frame.m, np.inf)
    values[list(active)] = _radial_scaling(sphere.values[list(active)], r, 0.0)
    free = tuple(i for i in range(frame.m) if i not in set(active))
    logger.info(f"Boule positive : {len(facets)} facette(s) utile(s), {len(free)} indice(s) libre(s)")
    return BiasEstimate(
        values=values,
        method=EstimationMethod.PBE_NONNEG,
        free_indices=free,
        flagged_indices=tuple(i for i in sphere.flagged_indices if i in active),
        metadata={**sphere.metadata, "domain": "nonneg_ball", "r": r, "nonneg_facets": list(facets)},
    )


def pbe_ball_complement(
    frame: Frame,
    s: float,
    fs: Optional[FacetStructure] = None,
    cap: int = DEFAULT_ENUMERATION_CAP,
    tol: Tolerances = DEFAULT_TOLERANCES,
) -> BiasEstimate:
    """
    Biais s * alpha_Phi^Delta sur le complémentaire de la boule ouverte B_s.

    Raises:
        MethodInfeasibleError: Si alpha_Phi^Delta a une coordonnée négative
    """
    if not s > 0:
        raise InvalidDomainError(f"Rayon invalide: {s}")
    boundary = pbe_boundary(frame, fs, cap, tol)
    negative = np.flatnonzero(boundary.values < 0)
    if negative.size:
        raise MethodInfeasibleError(
            f"alpha_Phi^Delta a des coordonnées négatives (indices {negative.tolist()})",
            hint="l'estimation sur le complémentaire de boule exige alpha_Phi^Delta >= 0",
        )
    return BiasEstimate(
        values=s * boundary.values,
        method=EstimationMethod.PBE_COMPLEMENT,
        metadata={**boundary.metadata, "domain": "ball_complement", "s": s},
    )


def pbe_for_domain(
    frame: Frame,
    domain: DomainSpec,
    fs: Optional[FacetStructure] = None,
    max_iter: int = DEFAULT_SOLVER_ITERATIONS,
    dense_samples: int = DEFAULT_DENSE_SAMPLES,
    seed: int = 0,
    cap: int = DEFAULT_ENUMERATION_CAP,
    tol: Tolerances = DEFAULT_TOLERANCES,
) -> BiasEstimate:
    """
    Estimation polytopale adaptée au domaine.

    Raises:
        MethodInfeasibleError: Domaine sans estimation polytopale
    """
    solver = {"max_iter": max_iter, "dense_samples": dense_samples, "seed": seed}
    v = domain.variant
    if v == Variant.POLYTOPE_BOUNDARY:
        return pbe_boundary(frame, fs, cap, tol)
    if v == Variant.SPHERE:
        return pbe_sphere(frame, fs, cap=cap, tol=tol, **solver)
    if v == Variant.BALL:
        return pbe_donut(frame, domain.r, 0.0, fs, cap=cap, tol=tol, **solver)
    if v == Variant.DONUT:
        return pbe_donut(frame, domain.r, domain.s, fs, cap=cap, tol=tol, **solver)
    if v == Variant.NONNEG_BALL:
        return pbe_nonneg_ball(frame, domain.r, fs, cap=cap, tol=tol, **solver)
    if v == Variant.BALL_COMPLEMENT:
        return pbe_ball_complement(frame, domain.s, fs, cap, tol)
    raise MethodInfeasibleError(
        f"Pas d'estimation polytopale pour le domaine {v.value}",
        hint="utiliser la méthode par échantillonnage",
    )
