"""
Omnidirectionnalité : l'origine est intérieure au polytope inscrit.
"""

from typing import Optional

import numpy as np
from loguru import logger
from scipy.optimize import linprog

from ..frames.frame import Frame
from ..frames.numerics import DEFAULT_ENUMERATION_CAP, DEFAULT_TOLERANCES, Tolerances, numerical_rank
from ..utils.errors import DegenerateHullError
from .facets import FacetStructure, enumerate_facets


def is_omnidirectional(
    frame: Frame,
    fs: Optional[FacetStructure] = None,
    cap: int = DEFAULT_ENUMERATION_CAP,
    tol: Tolerances = DEFAULT_TOLERANCES,
) -> bool:
    """
    Test par les facettes : b > tol.face pour chaque facette.

    Un polytope dégénéré (frame contenue dans un hyperplan affine) n'a pas
    d'intérieur : la frame n'est pas omnidirectionnelle.

    Raises:
        EnumerationCapError: Si l'énumération des facettes dépasse le plafond
    """
    if fs is None:
        try:
            fs = enumerate_facets(frame, cap=cap, tol=tol)
        except DegenerateHullError:
            logger.debug(f"Polytope inscrit dégénéré pour {frame!r}")
            return False
    return bool(np.all(fs.offsets > tol.face))


def is_omnidirectional_lp(frame: Frame, tol: Tolerances = DEFAULT_TOLERANCES) -> bool:
    """
    Test par programmation linéaire : 0 = sum c_i phi_i avec c_i > 0.

    On maximise t sous sum c_i phi_i = 0, sum c_i = 1, c_i >= t. La frame
    est omnidirectionnelle si et seulement si t* > 0 et le rang vaut n.
    """
    m, n = frame.m, frame.n
    if numerical_rank(frame.vectors, tol) < n:
        return False

    # Variables (c_1, ..., c_m, t) ; on minimise -t
    objective = np.zeros(m + 1)
    objective[-1] = -1.0
    a_eq = np.zeros((n + 1, m + 1))
    a_eq[:n, :m] = frame.vectors.T
    a_eq[n, :m] = 1.0
    b_eq = np.zeros(n + 1)
    b_eq[n] = 1.0
    a_ub = np.hstack([-np.eye(m), np.ones((m, 1))])
    b_ub = np.zeros(m)
    bounds = [(0.0, None)] * m + [(None, 1.0)]

    res = linprog(objective, A_ub=a_ub, b_ub=b_ub, A_eq=a_eq, b_eq=b_eq, bounds=bounds, method="highs")
    if res.status != 0:
        return False
    return bool(-res.fun > tol.solver)


def make_omnidirectional(frame: Frame, tol: Tolerances = DEFAULT_TOLERANCES) -> Frame:
    """
    Ajoute -sum(phi_i)/||sum(phi_i)|| à la frame.

    Si la somme est nulle, la frame est renvoyée inchangée.
    """
    total = frame.vectors.sum(axis=0)
    norm = float(np.linalg.norm(total))
    if norm <= tol.rank * frame.m * float(np.max(frame.norms)):
        return frame
    logger.info(f"Ajout du vecteur {np.round(-total / norm, 6).tolist()} pour rendre la frame omnidirectionnelle")
    return frame.append(-total / norm)
