"""
Reconstruction de l'entrée à partir de la sortie d'une couche ReLU.

L'ensemble actif est lu sur la sortie : z_i > 0 signifie
<x, phi_i> = z_i + alpha_i > alpha_i. Une sortie nulle avec alpha_i <= 0
peut provenir d'un coefficient exactement au seuil ; ces indices sont
écartés et signalés.
"""

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Any, Dict, List, Optional, Tuple, Union

import numpy as np
from loguru import logger

from ..frames.frame import BiasLike, Frame, IndexSet, as_bias
from ..frames.numerics import DEFAULT_TOLERANCES, Tolerances, numerical_rank
from ..frames.operations import relu_layer
from ..polytope.facets import FacetStructure, facet_for_point
from ..utils.config import worker_count
from ..utils.errors import DimensionError, NotInvertibleError
from ..utils.io import to_jsonable
from .duals import DualSynthesis, canonical_dual, facet_duals, relu_synthesis

# Résidu relatif au-delà duquel la sortie est considérée hors de l'image
RESIDUAL_WARNING = 1e-8


@dataclass
class ReconstructionResult:
    """Entrée reconstruite, sous-frame utilisée et résidu ||C_alpha x - z||."""
    x: np.ndarray
    subset: IndexSet
    residual: float
    iterations: int = 0
    ambiguous_indices: Tuple[int, ...] = ()
    converged: bool = True
    history: List[float] = field(default_factory=list)
    errors: List[float] = field(default_factory=list)
    metadata: Dict[str, Any] = field(default_factory=dict)

    def to_dict(self) -> Dict[str, Any]:
        return to_jsonable({
            "x": self.x,
            "subset": list(self.subset),
            "residual": self.residual,
            "iterations": self.iterations,
            "ambiguous_indices": list(self.ambiguous_indices),
            "converged": self.converged,
            "metadata": self.metadata,
        })


def _output_vector(frame: Frame, z) -> np.ndarray:
    z = np.asarray(z, dtype=float).reshape(-1)
    if z.shape[0] != frame.m:
        raise DimensionError(f"Sortie de longueur {z.shape[0]}, attendu {frame.m}")
    return z


def read_active(z: np.ndarray, alpha: np.ndarray) -> Tuple[np.ndarray, Tuple[int, ...]]:
    """
    Ensemble actif lu sur la sortie et indices ambigus.

    Returns:
        (indices actifs, indices ambigus z_i = 0 avec alpha_i <= 0)
    """
    active = np.flatnonzero(z > 0)
    ambiguous = tuple(int(i) for i in np.flatnonzero((z <= 0) & (alpha <= 0)))
    return active, ambiguous


def residual(frame: Frame, bias: BiasLike, x: np.ndarray, z: np.ndarray) -> float:
    return float(np.linalg.norm(relu_layer(frame, bias, x) - z))


def _choose_subset(frame: Frame, active: np.ndarray, coeffs: np.ndarray, tol: Tolerances) -> IndexSet:
    """Les n plus grands coefficients s'ils forment une base, sinon tout l'ensemble actif."""
    if active.size < frame.n:
        raise NotInvertibleError(f"Seulement {active.size} indice(s) actif(s) pour n = {frame.n}")
    order = active[np.argsort(-coeffs[active], kind="stable")]
    top = np.sort(order[:frame.n])
    if numerical_rank(frame.subset(top), tol) == frame.n:
        return tuple(int(i) for i in top)
    if numerical_rank(frame.subset(active), tol) == frame.n:
        return tuple(int(i) for i in active)
    raise NotInvertibleError("L'ensemble actif de la sortie ne contient pas de frame")


def reconstruct(frame: Frame, bias: BiasLike, z, tol: Tolerances = DEFAULT_TOLERANCES) -> ReconstructionResult:
    """
    Reconstruit x à partir de z = C_alpha x par une duale de l'ensemble actif.

    Raises:
        NotInvertibleError: L'ensemble actif ne contient pas de frame
    """
    alpha = as_bias(frame, bias)
    z = _output_vector(frame, z)
    active, ambiguous = read_active(z, alpha)
    if ambiguous:
        logger.debug(f"Indices ambigus écartés de l'ensemble actif : {list(ambiguous)}")
    subset = _choose_subset(frame, active, z + alpha, tol)
    x = relu_synthesis(canonical_dual(frame, subset, tol), z, alpha)
    res = residual(frame, alpha, x, z)
    if res > RESIDUAL_WARNING * max(1.0, float(np.linalg.norm(z))):
        logger.warning(f"Résidu de reconstruction élevé : {res:.3g} (sortie hors de l'image ?)")
    return ReconstructionResult(x=x, subset=subset, residual=res, ambiguous_indices=ambiguous)


def reconstruct_many(
    frame: Frame,
    bias: BiasLike,
    outputs,
    workers: Optional[int] = None,
    tol: Tolerances = DEFAULT_TOLERANCES,
) -> List[Union[ReconstructionResult, NotInvertibleError]]:
    """
    Reconstruit un lot de sorties dans l'ordre ; une sortie non inversible
    donne son erreur à sa place sans interrompre le lot.
    """
    outputs = np.atleast_2d(np.asarray(outputs, dtype=float))

    def one(z: np.ndarray) -> Union[ReconstructionResult, NotInvertibleError]:
        try:
            return reconstruct(frame, bias, z, tol)
        except NotInvertibleError as e:
            return e

    with ThreadPoolExecutor(max_workers=workers or worker_count()) as executor:
        results = list(executor.map(one, outputs))
    failures = sum(isinstance(r, NotInvertibleError) for r in results)
    logger.info(f"{len(results)} sortie(s) reconstruite(s), {failures} non inversible(s)")
    return results


def reconstruct_by_facet(
    frame: Frame,
    bias: BiasLike,
    z,
    fs: FacetStructure,
    duals: Optional[Dict[int, DualSynthesis]] = None,
    tol: Tolerances = DEFAULT_TOLERANCES,
) -> ReconstructionResult:
    """
    Reconstruction par les duales des facettes.

    Une facette candidate a tous ses sommets actifs dans z ; la
    reconstruction est retenue si le point obtenu tombe dans le cône de
    cette facette (ou sur son bord).

    Raises:
        NotInvertibleError: Aucune facette compatible avec la sortie
    """
    alpha = as_bias(frame, bias)
    z = _output_vector(frame, z)
    duals = duals if duals is not None else facet_duals(frame, fs, tol=tol)
    active, ambiguous = read_active(z, alpha)
    active_set = set(int(i) for i in active)
    fallback: Optional[ReconstructionResult] = None
    for j, facet in enumerate(fs.facets):
        if not set(facet.vertices) <= active_set:
            continue
        x = relu_synthesis(duals[j], z, alpha)
        result = ReconstructionResult(
            x=x, subset=duals[j].subset, residual=residual(frame, alpha, x, z), ambiguous_indices=ambiguous,
            metadata={"facet": j},
        )
        if np.linalg.norm(x) == 0.0:
            return result
        hit = facet_for_point(fs, x, tol)
        if hit.facet == j or (hit.boundary and result.residual <= RESIDUAL_WARNING * max(1.0, float(np.linalg.norm(z)))):
            return result
        fallback = fallback or result
    if fallback is not None:
        logger.warning("Aucune facette cohérente avec la reconstruction : premier candidat retenu")
        return fallback
    raise NotInvertibleError("Aucune facette n'a tous ses sommets actifs")


def prelu_inverse(
    frame: Frame,
    bias: BiasLike,
    gamma: float,
    z,
    dual: Optional[DualSynthesis] = None,
    tol: Tolerances = DEFAULT_TOLERANCES,
) -> np.ndarray:
    """
    Inverse à gauche de la couche PReLU_gamma.

    Coordonnées actives (z_i >= 0) : z_i + alpha_i ; inactives :
    z_i / gamma + alpha_i ; puis synthèse par la duale de la frame entière.

    Raises:
        ValueError: gamma hors de ]0, 1] ou duale partielle
    """
    if not 0 < gamma <= 1:
        raise ValueError(f"gamma doit être dans ]0, 1] (reçu {gamma})")
    alpha = as_bias(frame, bias)
    z = _output_vector(frame, z)
    dual = dual if dual is not None else canonical_dual(frame, range(frame.m), tol)
    if dual.subset != tuple(range(frame.m)):
        raise ValueError("L'inverse PReLU exige la duale de la frame entière")
    coeffs = np.where(z >= 0, z, z / gamma) + alpha
    return dual.synthesis @ coeffs
