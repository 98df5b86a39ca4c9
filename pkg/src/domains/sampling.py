"""
Échantillonneurs déterministes des domaines d'entrée.

Le générateur est Philox (compteur, 64 bits) de numpy ; les lots sont
produits par des sous-générateurs issus de ``SeedSequence(seed).spawn``,
ce qui rend la suite reproductible et indépendante de la taille demandée.
"""

from dataclasses import dataclass
from typing import Iterator, List, NamedTuple, Optional, Tuple

import numpy as np
from loguru import logger
from scipy.spatial import Delaunay, QhullError

from ..utils.errors import InvalidDomainError
from .domain import DomainSpec, Variant

GENERATOR_ID = "numpy.Philox"

# Taille des lots générés par un même sous-générateur
SAMPLE_CHUNK = 16_384


@dataclass(frozen=True, eq=False)
class SampleSequence:
    """Suite ordonnée de points d'un domaine, avec sa graine."""
    points: np.ndarray
    seed: int
    generator: str = GENERATOR_ID
    domain: Optional[DomainSpec] = None

    def __post_init__(self):
        points = np.array(self.points, dtype=float)
        if points.ndim == 1:
            points = points.reshape(1, -1)
        points.setflags(write=False)
        object.__setattr__(self, "points", points)

    def __len__(self) -> int:
        return self.points.shape[0]

    def __iter__(self):
        return iter(self.points)


class RadialProfile(NamedTuple):
    """Segment radial [inner, outer] porté par chaque direction."""
    inner: float
    outer: float
    nonnegative: bool


def make_rng(seed: int) -> np.random.Generator:
    """Générateur Philox initialisé par la graine."""
    return np.random.Generator(np.random.Philox(seed))


def _unit_directions(rng: np.random.Generator, count: int, n: int) -> np.ndarray:
    gaussian = rng.standard_normal((count, n))
    return gaussian / np.linalg.norm(gaussian, axis=1, keepdims=True)


def _radii(rng: np.random.Generator, count: int, n: int, outer: float, inner: float = 0.0) -> np.ndarray:
    """Rayons de densité proportionnelle à t^(n-1) sur [inner, outer]."""
    u = rng.random(count)
    return (inner ** n + u * (outer ** n - inner ** n)) ** (1.0 / n)


def radial_profile(domain: DomainSpec) -> Optional[RadialProfile]:
    """
    Segment radial associé au domaine, ou None si le domaine n'est pas
    invariant par direction (bord de polytope, nuage, domaines non bornés).
    """
    v = domain.variant
    if v == Variant.SPHERE:
        return RadialProfile(1.0, 1.0, False)
    if v == Variant.BALL:
        return RadialProfile(0.0, domain.r, False)
    if v == Variant.DONUT:
        return RadialProfile(domain.s, domain.r, False)
    if v == Variant.NONNEG_BALL:
        return RadialProfile(0.0, domain.r, True)
    return None


# --------------------------------------------------------------------------
# Bord du polytope inscrit
# --------------------------------------------------------------------------

def _simplex_volume(vertices: np.ndarray) -> float:
    """Volume (à une constante près) d'un simplexe par déterminant de Gram."""
    edges = vertices[1:] - vertices[0]
    gram = edges @ edges.T
    return float(np.sqrt(max(np.linalg.det(gram), 0.0)))


def _facet_simplices(points: np.ndarray, normal: np.ndarray) -> List[np.ndarray]:
    """
    Triangule une facette non simpliciale dans son hyperplan affine.

    Les sommets sont projetés sur une base orthonormée de l'hyperplan puis
    triangulés par Delaunay ; en dimension 2 la facette est un segment
    entre ses deux sommets extrêmes.
    """
    n = points.shape[1]
    if len(points) == n:
        return [points]
    center = points.mean(axis=0)
    # Base de l'hyperplan : complément orthogonal de la normale
    _, _, vt = np.linalg.svd(normal.reshape(1, -1))
    local = (points - center) @ vt[1:].T
    if n == 2:
        order = np.argsort(local[:, 0])
        return [points[[order[0], order[-1]]]]
    try:
        triangulation = Delaunay(local)
    except QhullError as e:
        raise InvalidDomainError(f"Triangulation de facette impossible : {e}") from e
    return [points[simplex] for simplex in triangulation.simplices]


def boundary_simplices(domain: DomainSpec) -> Tuple[List[np.ndarray], np.ndarray]:
    """Simplexes couvrant le bord du polytope et leurs poids normalisés."""
    structure = domain.facets
    vectors = domain.frame.vectors
    simplices: List[np.ndarray] = []
    for facet in structure.facets:
        simplices.extend(_facet_simplices(vectors[list(facet.vertices)], facet.normal))
    volumes = np.array([_simplex_volume(s) for s in simplices])
    if not np.sum(volumes) > 0:
        raise InvalidDomainError("Le bord du polytope est de mesure nulle")
    return simplices, volumes / np.sum(volumes)


def _sample_boundary(rng: np.random.Generator, count: int, simplices, weights) -> np.ndarray:
    choice = rng.choice(len(simplices), size=count, p=weights)
    stacked = np.stack(simplices)
    barycentric = rng.dirichlet(np.ones(stacked.shape[1]), size=count)
    return np.einsum("kv,kvn->kn", barycentric, stacked[choice])


# --------------------------------------------------------------------------
# Échantillonnage
# --------------------------------------------------------------------------

def _sample_block(domain: DomainSpec, rng: np.random.Generator, count: int, gaussian: bool, boundary) -> np.ndarray:
    n = domain.n
    v = domain.variant
    if v == Variant.SPHERE:
        return _unit_directions(rng, count, n)
    if v in (Variant.BALL, Variant.NONNEG_BALL):
        points = _unit_directions(rng, count, n) * _radii(rng, count, n, domain.r)[:, None]
        return np.abs(points) if v == Variant.NONNEG_BALL else points
    if v == Variant.DONUT:
        return _unit_directions(rng, count, n) * _radii(rng, count, n, domain.r, domain.s)[:, None]
    if v == Variant.POLYTOPE_BOUNDARY:
        return _sample_boundary(rng, count, *boundary)
    if v == Variant.SAMPLE_CLOUD:
        return domain.points[rng.integers(0, domain.points.shape[0], size=count)]
    return rng.standard_normal((count, n))


def _check_samplable(domain: DomainSpec, gaussian: bool) -> None:
    v = domain.variant
    if v == Variant.BALL_COMPLEMENT or (v == Variant.FULL_SPACE and not gaussian):
        raise InvalidDomainError(
            f"Échantillonnage uniforme impossible sur le domaine non borné {v.value}"
            + (" (utiliser le mode gaussien)" if v == Variant.FULL_SPACE else "")
        )


def _direction_block(domain: DomainSpec, rng: np.random.Generator, count: int) -> np.ndarray:
    block = _unit_directions(rng, count, domain.n)
    return np.abs(block) if radial_profile(domain).nonnegative else block


def sample_stream(domain: DomainSpec, seed: int, gaussian: bool = False, directions: bool = False) -> Iterator[np.ndarray]:
    """
    Flux infini de lots de SAMPLE_CHUNK points.

    Le lot k est produit par le k-ième enfant de ``SeedSequence(seed)`` :
    les N premiers points du flux ne dépendent pas de la taille demandée.
    Avec ``directions``, le flux contient les directions unitaires de la
    réduction radiale au lieu des points du domaine.

    Raises:
        InvalidDomainError: Domaine non échantillonnable
    """
    if directions and radial_profile(domain) is None:
        raise InvalidDomainError(f"Pas de réduction radiale pour le domaine {domain.variant.value}")
    if not directions:
        _check_samplable(domain, gaussian)
    boundary = boundary_simplices(domain) if domain.variant == Variant.POLYTOPE_BOUNDARY and not directions else None

    def blocks() -> Iterator[np.ndarray]:
        sequence = np.random.SeedSequence(seed)
        while True:
            rng = np.random.Generator(np.random.Philox(sequence.spawn(1)[0]))
            if directions:
                yield _direction_block(domain, rng, SAMPLE_CHUNK)
            else:
                yield _sample_block(domain, rng, SAMPLE_CHUNK, gaussian, boundary)

    return blocks()


def take(stream: Iterator[np.ndarray], count: int, n: int) -> np.ndarray:
    """Les ``count`` prochains points d'un flux."""
    blocks = []
    remaining = count
    while remaining > 0:
        block = next(stream)
        blocks.append(block[:remaining])
        remaining -= blocks[-1].shape[0]
    return np.vstack(blocks) if blocks else np.empty((0, n))


def sample(domain: DomainSpec, count: int, seed: int, gaussian: bool = False) -> SampleSequence:
    """
    Tire ``count`` points uniformes sur le domaine.

    Sphère : gaussienne normalisée ; boule : direction x rayon U^(1/n) ;
    donut : rayon de densité t^(n-1) sur [s, r] ; boule positive : valeur
    absolue de points de la boule ; bord du polytope : facette choisie au
    prorata de son volume, puis point barycentrique uniforme ; nuage :
    tirage avec remise (le nuage entier, dans l'ordre, si ``count`` est
    égal à sa taille).

    Args:
        domain: Domaine
        count: Nombre de points N
        seed: Graine 64 bits
        gaussian: Points gaussiens standards (obligatoire pour l'espace entier)

    Raises:
        InvalidDomainError: Domaine non échantillonnable
    """
    if count < 0:
        raise ValueError(f"Nombre d'échantillons négatif: {count}")
    if domain.variant == Variant.SAMPLE_CLOUD and count == domain.points.shape[0]:
        return SampleSequence(domain.points, seed, domain=domain)
    points = take(sample_stream(domain, seed, gaussian=gaussian), count, domain.n)
    logger.debug(f"{count} points tirés sur {domain!r} (graine {seed})")
    return SampleSequence(points, seed, domain=domain)


def sample_directions(domain: DomainSpec, count: int, seed: int) -> np.ndarray:
    """
    Directions unitaires uniformes (sphère, ou sphère positive pour la
    boule positive) de la réduction radiale.
    """
    return take(sample_stream(domain, seed, directions=True), count, domain.n)
