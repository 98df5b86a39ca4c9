"""
Duales canoniques des sous-frames et opérateurs de ReLU-synthèse.
"""

from dataclasses import dataclass
from typing import Dict, Optional

import numpy as np
from loguru import logger

from ..frames.frame import BiasLike, Frame, IndexSet, as_bias, as_index_set
from ..frames.numerics import DEFAULT_ENUMERATION_CAP, DEFAULT_TOLERANCES, Tolerances, spd_solve
from ..frames.operations import is_subframe
from ..polytope.facets import FacetStructure, enumerate_facets
from ..utils.errors import DimensionError, NotAFrameError
from ..utils.io import PathLike, write_frame_csv


@dataclass(frozen=True, eq=False)
class DualSynthesis:
    """
    Frame duale canonique (S_J^-1 phi_i)_{i in J} de la sous-frame Phi_J.

    ``dual_vectors`` est de forme (|J|, n) ; la synthèse duale D_J est sa
    transposée.
    """
    subset: IndexSet
    dual_vectors: np.ndarray
    frame: Frame

    def __post_init__(self):
        vectors = np.array(self.dual_vectors, dtype=float)
        vectors.setflags(write=False)
        object.__setattr__(self, "dual_vectors", vectors)

    @property
    def synthesis(self) -> np.ndarray:
        return self.dual_vectors.T

    def identity_error(self) -> float:
        """max |D_J C_J - Id| (nul pour une duale exacte)."""
        product = self.synthesis @ self.frame.subset(self.subset)
        return float(np.max(np.abs(product - np.eye(self.frame.n))))

    def to_csv(self, path: PathLike):
        """Exporte les vecteurs duaux (une ligne par indice de J)."""
        return write_frame_csv(Frame(self.dual_vectors), path)


def canonical_dual(frame: Frame, subset, tol: Tolerances = DEFAULT_TOLERANCES) -> DualSynthesis:
    """
    Duale canonique de Phi_J par résolution symétrique définie positive.

    Raises:
        NotAFrameError: Si Phi_J n'est pas une frame
    """
    indices = as_index_set(subset, frame.m)
    if not is_subframe(frame, indices, tol):
        raise NotAFrameError(f"La sous-collection {list(indices)} n'est pas une frame")
    sub = frame.subset(indices)
    operator = sub.T @ sub
    duals = spd_solve(operator, sub.T).T
    return DualSynthesis(subset=indices, dual_vectors=duals, frame=frame)


def relu_synthesis(dual: DualSynthesis, z, bias: BiasLike) -> np.ndarray:
    """
    ReLU-synthèse : somme sur J de (z_i + alpha_i) phi~_i.

    Args:
        dual: Duale de Phi_J
        z: Sortie de la couche (longueur m)
        bias: Biais alpha
    """
    frame = dual.frame
    z = np.asarray(z, dtype=float).reshape(-1)
    if z.shape[0] != frame.m:
        raise DimensionError(f"Sortie de longueur {z.shape[0]}, attendu {frame.m}")
    alpha = as_bias(frame, bias)
    indices = list(dual.subset)
    return dual.synthesis @ (z[indices] + alpha[indices])


def facet_duals(
    frame: Frame,
    fs: Optional[FacetStructure] = None,
    cap: int = DEFAULT_ENUMERATION_CAP,
    tol: Tolerances = DEFAULT_TOLERANCES,
) -> Dict[int, DualSynthesis]:
    """
    Duales canoniques des sous-frames des facettes d'une frame omnidirectionnelle.

    Returns:
        Dictionnaire identifiant de facette -> DualSynthesis
    """
    fs = fs if fs is not None else enumerate_facets(frame, cap=cap, tol=tol)
    duals = {j: canonical_dual(frame, facet.vertices, tol) for j, facet in enumerate(fs.facets)}
    logger.debug(f"{len(duals)} duale(s) de facettes précalculée(s)")
    return duals
