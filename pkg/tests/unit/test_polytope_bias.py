"""
Tests unitaires de l'estimation polytopale du biais
"""

import numpy as np
import pytest

from src.domains.domain import DomainSpec
from src.domains.sampling import sample
from src.estimation.polytope_bias import (
    cap_minimum,
    dense_sphere_bias,
    nonneg_active_indices,
    pbe_ball_complement,
    pbe_boundary,
    pbe_donut,
    pbe_for_domain,
    pbe_nonneg_ball,
    pbe_sphere,
    prepare_facets,
    project_cone_ball,
)
from src.estimation.results import EstimationMethod
from src.frames.catalog import (
    octahedron_frame,
    random_sphere_frame,
    regular_polygon_frame,
    square_frame,
    standard_basis,
    tetrahedron_frame,
    triangle_frame,
)
from src.frames.frame import Frame
from src.frames.operations import is_alpha_rectifying_on_samples
from src.polytope.facets import enumerate_facets
from src.utils.errors import InvalidDomainError, MethodInfeasibleError

TETRAHEDRON_SPHERE = -1.0 / np.sqrt(3.0)


@pytest.fixture(scope="module")
def tetrahedron_sphere():
    return pbe_sphere(tetrahedron_frame(), dense_samples=5000)


class TestPreconditions:
    """Tests des hypothèses de l'approche polytopale"""

    def test_not_normalized(self):
        """Test du refus d'une frame non normalisée"""
        with pytest.raises(MethodInfeasibleError):
            prepare_facets(Frame(2.0 * triangle_frame().vectors))

    def test_not_omnidirectional(self):
        """Test du refus de la base canonique"""
        with pytest.raises(MethodInfeasibleError) as excinfo:
            prepare_facets(standard_basis(2))
        assert "make_omnidirectional" in str(excinfo.value)

    def test_unsupported_domain(self):
        """Test d'un domaine sans estimation polytopale"""
        with pytest.raises(MethodInfeasibleError):
            pbe_for_domain(triangle_frame(), DomainSpec.full_space(2))


class TestBoundary:
    """Tests du biais sur le bord du polytope"""

    def test_triangle(self):
        """Test du triangle : -1/2 partout"""
        estimate = pbe_boundary(triangle_frame())
        assert np.allclose(estimate.values, -0.5)
        assert estimate.method == EstimationMethod.PBE_BOUNDARY

    def test_tetrahedron(self):
        """Test du tétraèdre : -1/3 partout"""
        assert np.allclose(pbe_boundary(tetrahedron_frame()).values, -1.0 / 3.0)

    def test_square(self):
        """Test du carré : 0 partout"""
        assert np.allclose(pbe_boundary(square_frame()).values, 0.0, atol=1e-15)

    def test_soundness(self):
        """Test du caractère rectifiant sur des points du bord"""
        frame = tetrahedron_frame()
        estimate = pbe_boundary(frame)
        points = sample(DomainSpec.polytope_boundary(frame), 10_000, seed=1).points
        assert is_alpha_rectifying_on_samples(frame, estimate.values, points).rectifying


class TestSphere:
    """Tests du biais sur la sphère"""

    def test_triangle(self):
        """Test du triangle : minimum de calotte atteint au sommet voisin"""
        estimate = pbe_sphere(triangle_frame(), dense_samples=2000)
        assert np.allclose(estimate.values, -0.5, atol=1e-9)
        assert estimate.flagged_indices == ()

    def test_tetrahedron_value(self, tetrahedron_sphere):
        """Test du tétraèdre : -1/sqrt(3) au milieu de l'arête opposée"""
        assert np.allclose(tetrahedron_sphere.values, TETRAHEDRON_SPHERE, atol=1e-6)

    def test_tetrahedron_oracle(self, tetrahedron_sphere):
        """Test de l'accord avec le balayage dense de la sphère"""
        oracle = dense_sphere_bias(tetrahedron_frame(), samples=200_000, seed=3)
        assert np.all(tetrahedron_sphere.values <= oracle + 1e-9)
        assert np.allclose(tetrahedron_sphere.values, oracle, atol=5e-3)

    def test_dominated_by_boundary(self):
        """Test de alpha_S <= alpha_Phi coordonnée par coordonnée"""
        rng = np.random.default_rng(0)
        for _ in range(5):
            frame = random_sphere_frame(3, 9, rng)
            fs = enumerate_facets(frame)
            if not np.all(fs.offsets > 0):
                continue
            sphere = pbe_sphere(frame, fs, dense_samples=2000)
            assert np.all(sphere.values <= pbe_boundary(frame, fs).values + 1e-12)

    def test_soundness(self):
        """Test du caractère rectifiant sur des points frais de la sphère"""
        frame = octahedron_frame()
        estimate = pbe_sphere(frame, dense_samples=2000)
        points = sample(DomainSpec.sphere(3), 10_000, seed=2).points
        assert is_alpha_rectifying_on_samples(frame, estimate.values, points).rectifying

    def test_metadata(self, tetrahedron_sphere):
        """Test des métadonnées de l'estimation"""
        assert tetrahedron_sphere.metadata["facets"] == 4
        assert tetrahedron_sphere.metadata["simplicial"] is True
        assert len(tetrahedron_sphere.metadata["witnesses"]) == 4

    def test_non_convergence_flagged(self):
        """Test du repli conservateur quand le solveur s'arrête trop tôt"""
        estimate = pbe_sphere(tetrahedron_frame(), max_iter=1, dense_samples=2000)
        assert estimate.flagged_indices
        assert np.all(estimate.values <= TETRAHEDRON_SPHERE + 2e-2)


class TestCapSolver:
    """Tests du gradient projeté sur une calotte"""

    def test_projection_in_cone_ball(self):
        """Test de la projection dans le cône et la boule"""
        vertices = tetrahedron_frame().vectors[:3]
        projected = project_cone_ball(vertices, np.array([0.0, 0.0, -5.0]))
        assert np.linalg.norm(projected) <= 1.0 + 1e-12

    def test_minimum_edge_midpoint(self):
        """Test du minimiseur au milieu de l'arête opposée"""
        vertices = tetrahedron_frame().vectors[:3]
        x, _, converged = cap_minimum(vertices, vertices[0])
        assert converged
        assert x @ vertices[0] == pytest.approx(TETRAHEDRON_SPHERE, abs=1e-6)
        midpoint = vertices[1] + vertices[2]
        assert np.allclose(x, midpoint / np.linalg.norm(midpoint), atol=1e-5)


class TestDonut:
    """Tests du biais sur le donut et la boule"""

    def test_triangle_ball(self):
        """Test du triangle sur la boule unité : -1/2 exactement"""
        estimate = pbe_donut(triangle_frame(), 1.0, 0.0, dense_samples=2000)
        assert np.allclose(estimate.values, -0.5, atol=1e-9)
        assert estimate.method == EstimationMethod.PBE_DONUT

    def test_radius_scaling(self, tetrahedron_sphere):
        """Test de la mise à l'échelle par r des valeurs négatives"""
        frame = tetrahedron_frame()
        estimate = pbe_donut(frame, 2.0, 0.0, sphere=tetrahedron_sphere)
        assert np.allclose(estimate.values, 2.0 * tetrahedron_sphere.values)

    def test_inner_radius_scaling(self):
        """Test de la mise à l'échelle par s des valeurs positives"""
        frame = regular_polygon_frame(8)
        sphere = pbe_sphere(frame, dense_samples=2000)
        assert np.all(sphere.values > 0)
        estimate = pbe_donut(frame, 2.0, 0.5, sphere=sphere)
        assert np.allclose(estimate.values, 0.5 * sphere.values)

    def test_invalid_radii(self):
        """Test du rejet des rayons invalides"""
        with pytest.raises(InvalidDomainError):
            pbe_donut(triangle_frame(), 1.0, 1.0)

    def test_scaled_ball_soundness(self):
        """Test de la validité sur B_2 (la valeur -1/4 échouerait en 2 phi_1)"""
        frame = triangle_frame()
        estimate = pbe_for_domain(frame, DomainSpec.ball(2, 2.0), dense_samples=2000)
        assert np.allclose(estimate.values, -1.0)
        points = sample(DomainSpec.ball(2, 2.0), 10_000, seed=4).points
        assert is_alpha_rectifying_on_samples(frame, estimate.values, points).rectifying
        assert not is_alpha_rectifying_on_samples(frame, -0.25, [2.0 * frame.vectors[1]]).rectifying


class TestNonnegBall:
    """Tests du biais sur la boule positive"""

    def test_square_indices(self):
        """Test du carré : arêtes rencontrant le quadrant positif"""
        frame = square_frame()
        facets, indices = nonneg_active_indices(frame, enumerate_facets(frame))
        assert set(indices) == {0, 1, 2, 3}
        assert len(facets) == 3

    def test_hexagon_free_indices(self):
        """Test de l'hexagone : les sommets à 180 et 240 degrés sont libres"""
        estimate = pbe_nonneg_ball(regular_polygon_frame(6), 1.0, dense_samples=2000)
        assert estimate.free_indices == (3, 4)
        assert np.all(np.isinf(estimate.values[[3, 4]]))
        assert np.all(np.isfinite(estimate.values[[0, 1, 2, 5]]))

    def test_radius_scaling(self):
        """Test de la mise à l'échelle par r sur I+"""
        frame = regular_polygon_frame(6)
        unit = pbe_nonneg_ball(frame, 1.0, dense_samples=2000)
        double = pbe_nonneg_ball(frame, 2.0, dense_samples=2000)
        active = [0, 1, 2, 5]
        assert np.allclose(double.values[active], 2.0 * np.minimum(unit.values[active], 0.0))

    def test_soundness(self):
        """Test du caractère rectifiant sur des points de la boule positive"""
        frame = regular_polygon_frame(7, offset_degrees=10.0)
        estimate = pbe_nonneg_ball(frame, 1.0, dense_samples=2000)
        points = sample(DomainSpec.nonneg_ball(2, 1.0), 10_000, seed=5).points
        assert is_alpha_rectifying_on_samples(frame, estimate.values, points).rectifying


class TestBallComplement:
    """Tests du biais sur le complémentaire de boule"""

    def test_square(self):
        """Test du carré : biais nul pour s = 2"""
        estimate = pbe_ball_complement(square_frame(), 2.0)
        assert np.allclose(estimate.values, 0.0)
        assert estimate.method == EstimationMethod.PBE_COMPLEMENT

    def test_unit_radius(self):
        """Test de s = 1 : valeurs du bord du polytope"""
        frame = octahedron_frame()
        assert np.allclose(pbe_ball_complement(frame, 1.0).values, pbe_boundary(frame).values)

    def test_negative_boundary_rejected(self):
        """Test du refus pour le triangle (alpha_Phi négatif)"""
        with pytest.raises(MethodInfeasibleError):
            pbe_ball_complement(triangle_frame(), 1.0)

    def test_dispatch(self):
        """Test du choix de la méthode selon le domaine"""
        frame = square_frame()
        assert pbe_for_domain(frame, DomainSpec.ball_complement(2, 3.0)).method == EstimationMethod.PBE_COMPLEMENT
        assert pbe_for_domain(frame, DomainSpec.polytope_boundary(frame)).method == EstimationMethod.PBE_BOUNDARY
