"""
Frames intégrées : polygones et polyèdres réguliers, bases canoniques
et frames aléatoires.
"""

from typing import Callable, Dict, Optional

import numpy as np

from .frame import Frame


def triangle_frame() -> Frame:
    """Frame équiangulaire de R^2 (trois vecteurs à 120 degrés)."""
    s = np.sqrt(3.0) / 2.0
    return Frame(np.array([[0.0, 1.0], [-s, -0.5], [s, -0.5]]))


def square_frame() -> Frame:
    """(e1, e2, -e1, -e2) dans R^2."""
    return Frame(np.array([[1.0, 0.0], [0.0, 1.0], [-1.0, 0.0], [0.0, -1.0]]))


def regular_polygon_frame(m: int, offset_degrees: float = 0.0) -> Frame:
    """Sommets d'un polygone régulier à m côtés sur le cercle unité."""
    angles = np.deg2rad(offset_degrees) + 2.0 * np.pi * np.arange(m) / m
    return Frame(np.column_stack([np.cos(angles), np.sin(angles)]))


def standard_basis(n: int) -> Frame:
    return Frame(np.eye(n))


def cross_polytope_frame(n: int) -> Frame:
    """(+-e_i) : l'octaèdre pour n = 3."""
    eye = np.eye(n)
    return Frame(np.vstack([eye, -eye]))


def octahedron_frame() -> Frame:
    return cross_polytope_frame(3)


def tetrahedron_frame() -> Frame:
    """Tétraèdre régulier inscrit dans la sphère unité."""
    vertices = np.array([[1.0, 1.0, 1.0], [1.0, -1.0, -1.0], [-1.0, 1.0, -1.0], [-1.0, -1.0, 1.0]])
    return Frame(vertices / np.sqrt(3.0))


def icosahedron_frame() -> Frame:
    """Icosaèdre régulier inscrit dans la sphère unité (12 sommets)."""
    golden = (1.0 + np.sqrt(5.0)) / 2.0
    vertices = []
    for a in (-1.0, 1.0):
        for b in (-golden, golden):
            vertices.append([0.0, a, b])
            vertices.append([a, b, 0.0])
            vertices.append([b, 0.0, a])
    vertices = np.array(vertices)
    return Frame(vertices / np.linalg.norm(vertices, axis=1, keepdims=True))


def random_sphere_frame(n: int, m: int, rng: np.random.Generator) -> Frame:
    """m vecteurs i.i.d. uniformes sur la sphère de R^n."""
    vectors = rng.standard_normal((m, n))
    return Frame(vectors / np.linalg.norm(vectors, axis=1, keepdims=True))


def gaussian_frame(n: int, m: int, rng: np.random.Generator) -> Frame:
    """m vecteurs i.i.d. gaussiens standards (non normalisés)."""
    return Frame(rng.standard_normal((m, n)))


BUILTIN_FRAMES: Dict[str, Callable[[], Frame]] = {
    "triangle": triangle_frame,
    "square": square_frame,
    "tetrahedron": tetrahedron_frame,
    "octahedron": octahedron_frame,
    "icosahedron": icosahedron_frame,
}


def builtin_frame(name: str, n: Optional[int] = None) -> Frame:
    """
    Frame intégrée par son nom.

    Args:
        name: "triangle", "square", "tetrahedron", "octahedron", "icosahedron",
            "basis" ou "cross" (ces deux derniers exigent n)
        n: Dimension pour les familles paramétrées

    Raises:
        ValueError: Si le nom est inconnu
    """
    if name in BUILTIN_FRAMES:
        return BUILTIN_FRAMES[name]()
    if name in ("basis", "cross"):
        if n is None:
            raise ValueError(f"La frame '{name}' exige une dimension (ex. {name}:3)")
        return standard_basis(n) if name == "basis" else cross_polytope_frame(n)
    raise ValueError(f"Frame intégrée inconnue: {name}")
