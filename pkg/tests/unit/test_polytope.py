"""
Tests unitaires du polytope inscrit
"""

import numpy as np
import pytest

from src.frames.catalog import (
    gaussian_frame,
    octahedron_frame,
    random_sphere_frame,
    square_frame,
    standard_basis,
    tetrahedron_frame,
    triangle_frame,
)
from src.frames.frame import Frame
from src.polytope.facets import FacetStructure, assign_facets, enumerate_facets, facet_for_point
from src.polytope.omnidirectional import is_omnidirectional, is_omnidirectional_lp, make_omnidirectional
from src.utils.errors import DegenerateHullError, EnumerationCapError, MethodInfeasibleError


def cube_frame() -> Frame:
    corners = np.array([[a, b, c] for a in (1, -1) for b in (1, -1) for c in (1, -1)], dtype=float)
    return Frame(corners / np.sqrt(3.0))


class TestEnumerateFacets:
    """Tests pour l'énumération des facettes"""

    def test_triangle(self):
        """Test des trois arêtes du triangle"""
        fs = enumerate_facets(triangle_frame())
        assert [f.vertices for f in fs.facets] == [(0, 1), (0, 2), (1, 2)]
        assert fs.simplicial

    def test_tetrahedron(self):
        """Test des quatre faces du tétraèdre, chacune omettant un sommet"""
        fs = enumerate_facets(tetrahedron_frame())
        assert len(fs) == 4
        omitted = sorted((set(range(4)) - set(f.vertices)).pop() for f in fs.facets)
        assert omitted == [0, 1, 2, 3]
        assert fs.simplicial

    def test_square(self):
        """Test des quatre arêtes du carré, chaque sommet dans deux facettes"""
        fs = enumerate_facets(square_frame())
        assert len(fs) == 4
        assert all(len(fs.facets_of(i)) == 2 for i in range(4))

    def test_octahedron(self):
        """Test des huit faces de l'octaèdre"""
        fs = enumerate_facets(octahedron_frame())
        assert len(fs) == 8
        assert len(fs.edges()) == 12

    def test_cube_non_simplicial(self):
        """Test de la fusion des sous-ensembles coplanaires du cube"""
        fs = enumerate_facets(cube_frame())
        assert len(fs) == 6
        assert all(len(f.vertices) == 4 for f in fs.facets)
        assert not fs.simplicial
        assert len(fs.edges()) == 12

    def test_outward_normals(self):
        """Test de l'orientation extérieure et de l'invariant demi-espace"""
        rng = np.random.default_rng(0)
        for _ in range(20):
            frame = random_sphere_frame(3, 10, rng)
            fs = enumerate_facets(frame)
            centroid = frame.vectors.mean(axis=0)
            assert np.all(fs.normals @ centroid < fs.offsets)
            assert np.allclose(np.linalg.norm(fs.normals, axis=1), 1.0)
            assert fs.check(frame)

    def test_cap(self):
        """Test du plafond d'énumération"""
        with pytest.raises(EnumerationCapError):
            enumerate_facets(gaussian_frame(4, 30, np.random.default_rng(1)), cap=100)

    def test_degenerate(self):
        """Test d'une frame contenue dans un hyperplan affine"""
        with pytest.raises(DegenerateHullError):
            enumerate_facets(Frame(np.array([[1.0, 0.0], [1.0, 1.0], [1.0, -1.0]])))

    def test_json_round_trip(self):
        """Test de la sérialisation de la structure"""
        fs = enumerate_facets(tetrahedron_frame())
        data = fs.to_dict()
        assert data["simplicial"] is True
        restored = FacetStructure.from_dict(data)
        assert [f.vertices for f in restored.facets] == [f.vertices for f in fs.facets]
        assert np.allclose(restored.normals, fs.normals)


class TestOmnidirectional:
    """Tests de l'omnidirectionnalité"""

    def test_triangle(self):
        """Test du triangle omnidirectionnel"""
        assert is_omnidirectional(triangle_frame())
        assert is_omnidirectional_lp(triangle_frame())

    def test_standard_basis(self):
        """Test de la base canonique non omnidirectionnelle"""
        assert not is_omnidirectional(standard_basis(2))
        assert not is_omnidirectional_lp(standard_basis(2))

    def test_symmetrized(self):
        """Test de (Phi, -Phi) toujours omnidirectionnelle"""
        rng = np.random.default_rng(2)
        for _ in range(10):
            vectors = rng.standard_normal((4, 3))
            frame = Frame(np.vstack([vectors, -vectors]))
            assert is_omnidirectional(frame)
            assert is_omnidirectional_lp(frame)

    def test_shifted_hull(self):
        """Test d'un polytope ne contenant pas l'origine"""
        frame = Frame(np.array([[1.0, 0.0], [0.0, 1.0], [1.0, 1.0]]))
        assert not is_omnidirectional(frame)
        assert not is_omnidirectional_lp(frame)

    def test_make_basis(self):
        """Test du vecteur ajouté à la base canonique"""
        augmented = make_omnidirectional(standard_basis(2))
        assert augmented.m == 3
        assert np.allclose(augmented.vectors[-1], [-1.0 / np.sqrt(2.0), -1.0 / np.sqrt(2.0)])
        assert is_omnidirectional(augmented)

    def test_make_unchanged(self):
        """Test du triangle inchangé (somme nulle)"""
        frame = triangle_frame()
        assert make_omnidirectional(frame) is frame

    def test_make_half_space(self):
        """Test d'une frame contenue dans un demi-espace"""
        rng = np.random.default_rng(3)
        for _ in range(10):
            vectors = rng.standard_normal((6, 3))
            vectors[:, 0] = np.abs(vectors[:, 0]) + 0.1
            frame = Frame(vectors / np.linalg.norm(vectors, axis=1, keepdims=True))
            assert not is_omnidirectional_lp(frame)
            augmented = make_omnidirectional(frame)
            assert is_omnidirectional(augmented)
            assert is_omnidirectional_lp(augmented)


class TestFacetForPoint:
    """Tests de la facette contenant un point"""

    def test_tetrahedron_centroid(self):
        """Test de la direction du barycentre d'une face"""
        frame = tetrahedron_frame()
        fs = enumerate_facets(frame)
        for j, facet in enumerate(fs.facets):
            hit = facet_for_point(fs, frame.vectors[list(facet.vertices)].mean(axis=0))
            assert hit.facet == j
            assert not hit.boundary

    def test_vertex_on_boundary(self):
        """Test du sommet partagé par deux arêtes"""
        frame = triangle_frame()
        hit = facet_for_point(enumerate_facets(frame), frame.vectors[0])
        assert hit.boundary
        assert hit.facet == 0

    def test_scale_invariance(self):
        """Test de l'invariance par homothétie des cônes"""
        rng = np.random.default_rng(4)
        frame = random_sphere_frame(3, 9, rng)
        fs = enumerate_facets(frame)
        points = rng.standard_normal((200, 3))
        first, _ = assign_facets(fs, points)
        second, _ = assign_facets(fs, 2.0 * points)
        assert np.array_equal(first, second)

    def test_point_in_cone(self):
        """Test de l'appartenance au cône : x / (<a, x>/b) est sur la facette"""
        rng = np.random.default_rng(5)
        frame = random_sphere_frame(3, 8, rng)
        fs = enumerate_facets(frame)
        for x in rng.standard_normal((50, 3)):
            j = facet_for_point(fs, x).facet
            facet = fs.facets[j]
            projected = x * facet.offset / (facet.normal @ x)
            assert np.all(fs.normals @ projected <= fs.offsets + 1e-9)

    def test_zero_point(self):
        """Test du rejet du point nul"""
        fs = enumerate_facets(triangle_frame())
        with pytest.raises(ValueError):
            facet_for_point(fs, [0.0, 0.0])

    def test_origin_outside(self):
        """Test du refus quand l'origine n'est pas intérieure"""
        fs = enumerate_facets(Frame(np.array([[1.0, 0.0], [0.0, 1.0], [1.0, 1.0]])))
        with pytest.raises(MethodInfeasibleError):
            facet_for_point(fs, [1.0, 0.0])
