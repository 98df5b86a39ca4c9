"""
Description symbolique des domaines d'entrée K et tests d'appartenance.
"""

import json
from dataclasses import dataclass
from enum import Enum
from functools import cached_property
from typing import Any, Dict, Optional

import numpy as np
from scipy.spatial import cKDTree

from ..frames.frame import Frame
from ..frames.numerics import DEFAULT_TOLERANCES
from ..utils.errors import InvalidDomainError


class Variant(str, Enum):
    """Variantes de domaine supportées."""
    BALL = "ball"
    SPHERE = "sphere"
    DONUT = "donut"
    NONNEG_BALL = "nonneg_ball"
    BALL_COMPLEMENT = "ball_complement"
    POLYTOPE_BOUNDARY = "polytope_boundary"
    SAMPLE_CLOUD = "sample_cloud"
    FULL_SPACE = "full_space"


_ALIASES = {
    "cloud": Variant.SAMPLE_CLOUD,
    "complement": Variant.BALL_COMPLEMENT,
    "nonneg": Variant.NONNEG_BALL,
    "polytope": Variant.POLYTOPE_BOUNDARY,
    "full": Variant.FULL_SPACE,
}


@dataclass(frozen=True, eq=False)
class DomainSpec:
    """
    Domaine d'entrée K.

    Selon la variante, ``r`` est le rayon extérieur, ``s`` le rayon
    intérieur, ``points`` le nuage d'échantillons et ``frame`` la frame
    dont on considère le bord du polytope inscrit.
    """
    variant: Variant
    n: int
    r: Optional[float] = None
    s: Optional[float] = None
    points: Optional[np.ndarray] = None
    frame: Optional[Frame] = None
    membership_tol: float = DEFAULT_TOLERANCES.membership

    def __post_init__(self):
        object.__setattr__(self, "variant", Variant(self.variant))
        if self.n < 1:
            raise InvalidDomainError(f"Dimension invalide: {self.n}")
        v = self.variant
        if v in (Variant.BALL, Variant.NONNEG_BALL, Variant.DONUT) and not (self.r is not None and self.r > 0):
            raise InvalidDomainError(f"Le domaine {v.value} exige un rayon r > 0 (reçu {self.r})")
        if v == Variant.DONUT and not (self.s is not None and 0 <= self.s < self.r):
            raise InvalidDomainError(f"Le domaine donut exige 0 <= s < r (reçu r={self.r}, s={self.s})")
        if v == Variant.BALL_COMPLEMENT and not (self.s is not None and self.s > 0):
            raise InvalidDomainError(f"Le complémentaire de boule exige s > 0 (reçu {self.s})")
        if v == Variant.SAMPLE_CLOUD:
            if self.points is None or np.asarray(self.points).size == 0:
                raise InvalidDomainError("Le nuage d'échantillons est vide")
            points = np.array(self.points, dtype=float).reshape(-1, self.n)
            points.setflags(write=False)
            object.__setattr__(self, "points", points)
        if v == Variant.POLYTOPE_BOUNDARY:
            if self.frame is None or self.frame.n != self.n:
                raise InvalidDomainError("Le bord du polytope exige une frame de même dimension")

    # ------------------------------------------------------------------
    # Constructeurs
    # ------------------------------------------------------------------

    @classmethod
    def ball(cls, n: int, r: float = 1.0) -> "DomainSpec":
        return cls(Variant.BALL, n, r=r)

    @classmethod
    def sphere(cls, n: int) -> "DomainSpec":
        return cls(Variant.SPHERE, n, r=1.0)

    @classmethod
    def donut(cls, n: int, r: float, s: float) -> "DomainSpec":
        return cls(Variant.DONUT, n, r=r, s=s)

    @classmethod
    def nonneg_ball(cls, n: int, r: float = 1.0) -> "DomainSpec":
        return cls(Variant.NONNEG_BALL, n, r=r)

    @classmethod
    def ball_complement(cls, n: int, s: float) -> "DomainSpec":
        return cls(Variant.BALL_COMPLEMENT, n, s=s)

    @classmethod
    def polytope_boundary(cls, frame: Frame) -> "DomainSpec":
        return cls(Variant.POLYTOPE_BOUNDARY, frame.n, frame=frame)

    @classmethod
    def sample_cloud(cls, points) -> "DomainSpec":
        points = np.atleast_2d(np.asarray(points, dtype=float))
        return cls(Variant.SAMPLE_CLOUD, points.shape[1], points=points)

    @classmethod
    def full_space(cls, n: int) -> "DomainSpec":
        return cls(Variant.FULL_SPACE, n)

    # ------------------------------------------------------------------
    # Propriétés
    # ------------------------------------------------------------------

    @property
    def is_bounded(self) -> bool:
        return self.variant not in (Variant.BALL_COMPLEMENT, Variant.FULL_SPACE)

    @property
    def sup_norm(self) -> float:
        """M = sup_{x in K} ||x|| (infini pour les domaines non bornés)."""
        v = self.variant
        if v in (Variant.BALL, Variant.NONNEG_BALL, Variant.DONUT, Variant.SPHERE):
            return float(self.r)
        if v == Variant.POLYTOPE_BOUNDARY:
            return float(np.max(self.frame.norms))
        if v == Variant.SAMPLE_CLOUD:
            return float(np.max(np.linalg.norm(self.points, axis=1)))
        return float("inf")

    @cached_property
    def facets(self):
        """Structure de facettes du polytope inscrit (bord du polytope uniquement)."""
        from ..polytope.facets import enumerate_facets

        if self.variant != Variant.POLYTOPE_BOUNDARY:
            raise InvalidDomainError("Seul le bord du polytope possède des facettes")
        return enumerate_facets(self.frame)

    @cached_property
    def cloud_tree(self) -> cKDTree:
        """Arbre k-d du nuage de points (nuage uniquement)."""
        if self.variant != Variant.SAMPLE_CLOUD:
            raise InvalidDomainError("Seul le nuage de points possède un arbre k-d")
        return cKDTree(self.points)

    # ------------------------------------------------------------------
    # Appartenance
    # ------------------------------------------------------------------

    def contains_batch(self, points) -> np.ndarray:
        """Appartenance vectorisée, points de forme (N, n)."""
        points = np.asarray(points, dtype=float)
        if points.ndim == 1:
            points = points.reshape(1, -1)
        if points.shape[1] != self.n:
            raise InvalidDomainError(f"Points de dimension {points.shape[1]}, domaine de dimension {self.n}")
        tol = self.membership_tol
        norms = np.linalg.norm(points, axis=1)
        v = self.variant
        if v == Variant.BALL:
            return norms <= self.r * (1.0 + tol)
        if v == Variant.SPHERE:
            return np.abs(norms - 1.0) <= tol
        if v == Variant.DONUT:
            return (norms >= self.s * (1.0 - tol)) & (norms <= self.r * (1.0 + tol))
        if v == Variant.NONNEG_BALL:
            return np.all(points >= -tol * self.r, axis=1) & (norms <= self.r * (1.0 + tol))
        if v == Variant.BALL_COMPLEMENT:
            return norms >= self.s * (1.0 - tol)
        if v == Variant.POLYTOPE_BOUNDARY:
            fs = self.facets
            ratios = (points @ fs.normals.T) / fs.offsets
            return np.abs(np.max(ratios, axis=1) - 1.0) <= max(tol, 1e-10)
        if v == Variant.SAMPLE_CLOUD:
            scale = max(1.0, self.sup_norm)
            distances, _ = self.cloud_tree.query(points, k=1, distance_upper_bound=2.0 * tol * scale)
            return distances <= tol * scale
        return np.ones(points.shape[0], dtype=bool)

    def contains(self, x) -> bool:
        return bool(self.contains_batch(np.asarray(x, dtype=float).reshape(1, -1))[0])

    # ------------------------------------------------------------------
    # Sérialisation
    # ------------------------------------------------------------------

    def to_dict(self) -> Dict[str, Any]:
        data: Dict[str, Any] = {"variant": self.variant.value, "n": self.n}
        if self.r is not None and self.variant != Variant.SPHERE:
            data["r"] = float(self.r)
        if self.s is not None:
            data["s"] = float(self.s)
        if self.variant == Variant.SAMPLE_CLOUD:
            data["points"] = self.points.tolist()
        if self.variant == Variant.POLYTOPE_BOUNDARY:
            data["frame"] = self.frame.vectors.tolist()
        return data

    @classmethod
    def from_dict(cls, data: Dict[str, Any], n: Optional[int] = None, frame: Optional[Frame] = None) -> "DomainSpec":
        """
        Construit un domaine depuis un dictionnaire JSON.

        Raises:
            InvalidDomainError: Variante inconnue ou paramètres manquants
        """
        try:
            variant = _ALIASES.get(data["variant"]) or Variant(data["variant"])
        except (KeyError, ValueError) as e:
            raise InvalidDomainError(f"Variante de domaine inconnue: {data.get('variant')}") from e
        dim = data.get("n", n if n is not None else (frame.n if frame is not None else None))
        if variant == Variant.SAMPLE_CLOUD:
            return cls.sample_cloud(data["points"])
        if variant == Variant.POLYTOPE_BOUNDARY:
            source = Frame(np.asarray(data["frame"])) if "frame" in data else frame
            if source is None:
                raise InvalidDomainError("Le bord du polytope exige une frame")
            return cls.polytope_boundary(source)
        if dim is None:
            raise InvalidDomainError("La dimension n du domaine est inconnue")
        if variant == Variant.SPHERE:
            return cls.sphere(int(dim))
        return cls(variant, int(dim), r=data.get("r"), s=data.get("s"))

    @classmethod
    def parse(cls, text: str, n: Optional[int] = None, frame: Optional[Frame] = None) -> "DomainSpec":
        """
        Lit un domaine en JSON ou en notation courte.

        Exemples : ``ball:1.0``, ``donut:1.0:0.5``, ``sphere``,
        ``nonneg_ball:2``, ``ball_complement:2``, ``polytope_boundary``,
        ``cloud:points.csv``, ``full_space``,
        ``{"variant": "ball", "r": 1.0, "n": 3}``.
        """
        text = text.strip()
        if text.startswith("{"):
            try:
                return cls.from_dict(json.loads(text), n=n, frame=frame)
            except json.JSONDecodeError as e:
                raise InvalidDomainError(f"Domaine JSON invalide: {e}") from e

        name, _, rest = text.partition(":")
        if name in ("cloud", Variant.SAMPLE_CLOUD.value):
            from ..utils.io import read_points_csv

            return cls.sample_cloud(read_points_csv(rest))
        try:
            values = [float(v) for v in rest.split(":")] if rest else []
        except ValueError as e:
            raise InvalidDomainError(f"Paramètres de domaine invalides: {text}") from e
        data: Dict[str, Any] = {"variant": name}
        if values:
            key = "s" if (_ALIASES.get(name) or name) in (Variant.BALL_COMPLEMENT, "ball_complement") else "r"
            data[key] = values[0]
        if len(values) > 1:
            data["s"] = values[1]
        return cls.from_dict(data, n=n, frame=frame)

    def __repr__(self) -> str:
        params = ", ".join(f"{k}={v}" for k, v in (("r", self.r), ("s", self.s)) if v is not None)
        return f"DomainSpec({self.variant.value}, n={self.n}{', ' + params if params else ''})"


def contains(domain: DomainSpec, x) -> bool:
    """Appartenance exacte de x à K (tolérance relative sur les bords)."""
    return domain.contains(x)
