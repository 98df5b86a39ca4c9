"""
Facettes du polytope inscrit P_Phi = conv(phi_1, ..., phi_m).

L'énumération est brute : chaque sous-ensemble de n éléments affinement
indépendants définit un hyperplan, retenu s'il laisse tous les autres
éléments du même côté. Les sous-ensembles coplanaires sont fusionnés en
une seule facette (non simpliciale).
"""

from dataclasses import dataclass
from itertools import combinations, islice
from math import comb
from typing import Any, Dict, List, NamedTuple, Set, Tuple

import numpy as np
from loguru import logger

from ..frames.frame import Frame, IndexSet
from ..frames.numerics import DEFAULT_ENUMERATION_CAP, DEFAULT_TOLERANCES, Tolerances, numerical_rank
from ..utils.errors import DegenerateHullError, DimensionError, EnumerationCapError, MethodInfeasibleError

# Nombre de sous-ensembles traités par lot vectorisé
SUBSET_BATCH = 8192


@dataclass(frozen=True, eq=False)
class Facet:
    """Facette {x : <a, x> = b} avec ses sommets (indices de frame)."""
    vertices: IndexSet
    normal: np.ndarray
    offset: float

    def to_dict(self) -> Dict[str, Any]:
        return {"vertices": list(self.vertices), "normal": self.normal.tolist(), "offset": float(self.offset)}


class FacetHit(NamedTuple):
    """Facette dont le cône contient un point, avec indicateur de frontière."""
    facet: int
    boundary: bool


@dataclass(frozen=True, eq=False)
class FacetStructure:
    """Structure de facettes d'un polytope inscrit."""
    facets: Tuple[Facet, ...]
    n: int
    m: int

    @property
    def simplicial(self) -> bool:
        return all(len(f.vertices) == self.n for f in self.facets)

    @property
    def normals(self) -> np.ndarray:
        return np.array([f.normal for f in self.facets])

    @property
    def offsets(self) -> np.ndarray:
        return np.array([f.offset for f in self.facets])

    def __len__(self) -> int:
        return len(self.facets)

    def __getitem__(self, index: int) -> Facet:
        return self.facets[index]

    def facets_of(self, i: int) -> List[int]:
        """Identifiants des facettes dont phi_i est un sommet."""
        return [j for j, f in enumerate(self.facets) if i in f.vertices]

    def edges(self) -> Set[Tuple[int, int]]:
        """
        Arêtes : paires de sommets communes à au moins n - 1 facettes.

        En dimension 3, deux facettes adjacentes partagent exactement une
        arête ; les diagonales d'une facette non simpliciale sont exclues.
        """
        counts: Dict[Tuple[int, int], int] = {}
        for facet in self.facets:
            for pair in combinations(facet.vertices, 2):
                counts[pair] = counts.get(pair, 0) + 1
        return {pair for pair, count in counts.items() if count >= max(1, self.n - 1)}

    def check(self, frame: Frame, tol: Tolerances = DEFAULT_TOLERANCES) -> bool:
        """Vérifie l'invariant demi-espace de chaque facette contre les m sommets."""
        for facet in self.facets:
            values = frame.vectors @ facet.normal - facet.offset
            on_plane = np.flatnonzero(np.abs(values) <= tol.face)
            if np.any(values > tol.face) or tuple(on_plane) != facet.vertices:
                return False
        return True

    def to_dict(self) -> Dict[str, Any]:
        return {
            "n": self.n,
            "m": self.m,
            "simplicial": self.simplicial,
            "facets": [f.to_dict() for f in self.facets],
        }

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> "FacetStructure":
        facets = tuple(
            Facet(
                vertices=tuple(int(v) for v in f["vertices"]),
                normal=np.asarray(f["normal"], dtype=float),
                offset=float(f["offset"]),
            )
            for f in data["facets"]
        )
        return cls(facets=facets, n=int(data["n"]), m=int(data["m"]))


def _fit_plane(points: np.ndarray) -> Tuple[np.ndarray, float]:
    """Hyperplan {<a, x> = b} passant au mieux par les points, ||a|| = 1."""
    n = points.shape[1]
    system = np.hstack([points, -np.ones((points.shape[0], 1))])
    _, _, vt = np.linalg.svd(system)
    normal, offset = vt[-1, :n], vt[-1, n]
    scale = np.linalg.norm(normal)
    return normal / scale, float(offset / scale)


def _check_degenerate(frame: Frame, tol: Tolerances) -> None:
    system = np.hstack([frame.vectors, -np.ones((frame.m, 1))])
    if numerical_rank(system, tol) < frame.n + 1:
        raise DegenerateHullError(
            "Tous les éléments de la frame sont sur un même hyperplan : le polytope inscrit est dégénéré"
        )


def enumerate_facets(
    frame: Frame,
    cap: int = DEFAULT_ENUMERATION_CAP,
    tol: Tolerances = DEFAULT_TOLERANCES,
) -> FacetStructure:
    """
    Énumère les facettes du polytope inscrit par force brute sur les
    sous-ensembles de n éléments.

    Args:
        frame: Frame (de préférence normalisée)
        cap: Plafond du nombre de sous-ensembles C(m, n)
        tol: Tolérances (tol.face pour la coplanarité)

    Returns:
        FacetStructure, facettes triées par ensemble de sommets

    Raises:
        EnumerationCapError: Si C(m, n) dépasse le plafond
        DegenerateHullError: Si tous les éléments sont sur un hyperplan
    """
    n, m = frame.n, frame.m
    count = comb(m, n)
    if count > cap:
        raise EnumerationCapError(count, cap)
    _check_degenerate(frame, tol)

    vectors = frame.vectors
    found: Dict[IndexSet, None] = {}
    subsets = combinations(range(m), n)
    while True:
        batch = list(islice(subsets, SUBSET_BATCH))
        if not batch:
            break
        index = np.array(batch)
        systems = np.concatenate([vectors[index], -np.ones((len(batch), n, 1))], axis=2)
        _, singular, vt = np.linalg.svd(systems)
        independent = singular[:, n - 1] > tol.rank * (n + 1) * singular[:, 0]
        planes = vt[:, n, :]
        with np.errstate(divide="ignore", invalid="ignore"):
            planes = planes / np.linalg.norm(planes[:, :n], axis=1, keepdims=True)
            values = vectors @ planes[:, :n].T - planes[:, n]
        below = np.all(values <= tol.face, axis=0)
        above = np.all(values >= -tol.face, axis=0)
        for k in np.flatnonzero(independent & (below | above)):
            on_plane = tuple(int(i) for i in np.flatnonzero(np.abs(values[:, k]) <= tol.face))
            found.setdefault(on_plane, None)

    facets = []
    centroid = vectors.mean(axis=0)
    for vertex_set in sorted(found):
        normal, offset = _fit_plane(vectors[list(vertex_set)])
        if normal @ centroid > offset:
            normal, offset = -normal, -offset
        facets.append(Facet(vertices=vertex_set, normal=normal, offset=offset))

    structure = FacetStructure(facets=tuple(facets), n=n, m=m)
    logger.debug(f"{len(facets)} facette(s) énumérée(s) pour {frame!r} (simpliciale: {structure.simplicial})")
    return structure


def _require_origin_inside(fs: FacetStructure, tol: Tolerances) -> None:
    if np.any(fs.offsets <= tol.face):
        raise MethodInfeasibleError(
            "L'origine n'est pas intérieure au polytope inscrit",
            hint="rendre la frame omnidirectionnelle (make_omnidirectional)",
        )


def assign_facets(
    fs: FacetStructure,
    points,
    tol: Tolerances = DEFAULT_TOLERANCES,
) -> Tuple[np.ndarray, np.ndarray]:
    """
    Facette de chaque point (version vectorisée de facet_for_point).

    Returns:
        (identifiants (N,), indicateurs de frontière (N,))
    """
    _require_origin_inside(fs, tol)
    points = np.atleast_2d(np.asarray(points, dtype=float))
    if points.shape[1] != fs.n:
        raise DimensionError(f"Points de dimension {points.shape[1]}, polytope de dimension {fs.n}")
    if np.any(np.all(points == 0.0, axis=1)):
        raise ValueError("Le point nul n'appartient à aucun cône de facette")
    ratios = (points @ fs.normals.T) / fs.offsets
    best = np.max(ratios, axis=1, keepdims=True)
    ties = ratios >= best - tol.tie * np.maximum(1.0, np.abs(best))
    return np.argmax(ties, axis=1), np.sum(ties, axis=1) > 1


def facet_for_point(fs: FacetStructure, x, tol: Tolerances = DEFAULT_TOLERANCES) -> FacetHit:
    """
    Facette j dont le cône contient x : maximise <a_j, x> / b_j.

    En cas d'égalité (x sur le bord d'un cône), la plus petite
    identifiant est renvoyée avec ``boundary`` vrai.

    Raises:
        ValueError: Si x = 0
        MethodInfeasibleError: Si l'origine n'est pas intérieure au polytope
    """
    ids, boundary = assign_facets(fs, np.asarray(x, dtype=float).reshape(1, -1), tol)
    return FacetHit(facet=int(ids[0]), boundary=bool(boundary[0]))

