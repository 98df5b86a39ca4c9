"""
Tests unitaires de l'estimation du biais par échantillonnage
"""

import numpy as np
import pytest

from src.domains.covering import covering_radius_proxy
from src.domains.domain import DomainSpec
from src.estimation.results import EstimationMethod
from src.estimation.sampling_bias import (
    basis_selector,
    bias_trajectory,
    constant_bias_estimate,
    estimation_samples,
    sampling_bias_estimate,
    stopping_variant,
)
from src.frames.catalog import gaussian_frame, standard_basis, triangle_frame
from src.frames.frame import Frame
from src.frames.operations import is_alpha_rectifying_on_samples, most_correlated_basis
from src.utils.errors import DimensionError, MethodInfeasibleError


@pytest.fixture
def triangle():
    return triangle_frame()


class TestSamplingBiasEstimate:
    """Tests pour l'algorithme de mise à jour par minimum"""

    def test_triangle_ball(self, triangle):
        """Test du triangle sur la boule unité : valeurs proches de -1/2 par au-dessus"""
        estimate = sampling_bias_estimate(triangle, DomainSpec.ball(2), 100_000, seed=0, init="inf")
        assert np.all(estimate.values > -0.5)
        assert np.all(estimate.values < -0.49)
        assert estimate.method == EstimationMethod.SAMPLING

    def test_triangle_auto_init(self, triangle):
        """Test de l'initialisation par les éléments de la frame"""
        estimate = sampling_bias_estimate(triangle, DomainSpec.ball(2), 100_000, seed=0)
        assert np.all(estimate.values >= -0.5 - 1e-12)
        assert np.all(estimate.values < -0.49)

    def test_frame_element_pass_only(self):
        """Test de N = 0 : passe sur les éléments de la base canonique sur la sphère"""
        estimate = sampling_bias_estimate(standard_basis(2), DomainSpec.sphere(2), 0, seed=0)
        assert np.allclose(estimate.values, [0.0, 0.0])
        assert estimate.correction == 0.0

    def test_inf_init_without_samples(self, triangle):
        """Test des coordonnées jamais mises à jour"""
        estimate = sampling_bias_estimate(triangle, DomainSpec.ball(2), 0, seed=0, init="inf")
        assert np.all(np.isinf(estimate.values))

    def test_pbe_init(self, triangle):
        """Test de l'initialisation par l'estimation polytopale"""
        estimate = sampling_bias_estimate(triangle, DomainSpec.ball(2), 100, seed=0, init="pbe")
        assert np.allclose(estimate.values, -0.5)

    def test_explicit_init(self, triangle):
        """Test d'un vecteur initial explicite"""
        estimate = sampling_bias_estimate(triangle, DomainSpec.ball(2), 0, seed=0, init=[-2.0, -1.0, 0.0])
        assert np.allclose(estimate.values, [-2.0, -1.0, 0.0])

    def test_unknown_init(self, triangle):
        """Test du rejet d'une initialisation inconnue"""
        with pytest.raises(ValueError):
            sampling_bias_estimate(triangle, DomainSpec.ball(2), 10, seed=0, init="zeros")

    def test_dimension_mismatch(self, triangle):
        """Test du rejet d'un domaine de dimension différente"""
        with pytest.raises(DimensionError):
            sampling_bias_estimate(triangle, DomainSpec.ball(3), 10, seed=0)

    def test_soundness_on_samples(self):
        """Test du caractère alpha^(N)-rectifiant sur les échantillons utilisés"""
        rng = np.random.default_rng(1)
        for trial in range(5):
            frame = gaussian_frame(3, 9, rng)
            domain = DomainSpec.ball(3, 1.5)
            estimate = sampling_bias_estimate(frame, domain, 5000, seed=trial, radial=False, init="inf")
            points = estimation_samples(domain, 5000, seed=trial, radial=False)
            assert is_alpha_rectifying_on_samples(frame, estimate.values, points.points).rectifying

    def test_soundness_radial(self, triangle):
        """Test de la validité sur les points extérieurs de la réduction radiale"""
        domain = DomainSpec.donut(2, 2.0, 0.5)
        estimate = sampling_bias_estimate(triangle, domain, 2000, seed=4, init="inf")
        points = estimation_samples(domain, 2000, seed=4)
        assert np.allclose(np.linalg.norm(points.points, axis=1), 2.0)
        assert is_alpha_rectifying_on_samples(triangle, estimate.values, points.points).rectifying

    def test_correction(self, triangle):
        """Test du terme correctif pour une frame normalisée"""
        estimate = sampling_bias_estimate(triangle, DomainSpec.ball(2), 10_000, seed=0)
        assert estimate.correction == pytest.approx(covering_radius_proxy(2, 10_000))
        assert estimate.weights is None
        assert np.allclose(estimate.corrected(), estimate.values - estimate.correction)

    def test_correction_weights(self):
        """Test du terme correctif multiplié par les normes"""
        frame = Frame(np.array([[2.0, 0.0], [0.0, 1.0], [-1.0, -1.0]]))
        estimate = sampling_bias_estimate(frame, DomainSpec.ball(2), 1000, seed=0)
        assert np.allclose(estimate.weights, frame.norms)
        assert np.allclose(estimate.correction_vector, estimate.correction * frame.norms)

    def test_no_correction(self, triangle):
        """Test de la désactivation du terme correctif"""
        estimate = sampling_bias_estimate(triangle, DomainSpec.ball(2), 1000, seed=0, apply_correction=False)
        assert estimate.correction == 0.0

    def test_parallel_merge(self, triangle):
        """Test de l'égalité des passes séquentielle et parallèle"""
        domain = DomainSpec.ball(2)
        sequential = sampling_bias_estimate(triangle, domain, 50_000, seed=3, workers=1)
        parallel = sampling_bias_estimate(triangle, domain, 50_000, seed=3, workers=4)
        assert np.array_equal(sequential.values, parallel.values)

    def test_seed_reproducible(self, triangle):
        """Test de la reproductibilité à graine fixée"""
        domain = DomainSpec.sphere(2)
        first = sampling_bias_estimate(triangle, domain, 3000, seed=9)
        second = sampling_bias_estimate(triangle, domain, 3000, seed=9)
        assert np.array_equal(first.values, second.values)
        assert first.metadata["seed"] == 9
        assert first.metadata["N"] == 3000

    def test_gaussian_full_space(self):
        """Test de l'échantillonnage gaussien de l'espace entier"""
        frame = gaussian_frame(2, 12, np.random.default_rng(2))
        estimate = sampling_bias_estimate(frame, DomainSpec.full_space(2), 5000, seed=1, gaussian=True, radial=False)
        assert np.all(np.isfinite(estimate.values))
        assert estimate.metadata["gaussian"] is True


class TestBasisSelector:
    """Tests de la sélection des bases"""

    def test_non_full_spark_rejected(self):
        """Test du refus d'une frame non full-spark"""
        frame = Frame(np.array([[1.0, 0.0], [0.0, 1.0], [1.0, 0.0], [-1.0, -1.0]]))
        with pytest.raises(MethodInfeasibleError):
            basis_selector(frame)

    def test_non_full_spark_greedy(self):
        """Test de la sélection gloutonne autorisée"""
        frame = Frame(np.array([[1.0, 0.0], [0.0, 1.0], [1.0, 0.0], [-1.0, -1.0]]))
        selector = basis_selector(frame, allow_non_full_spark=True)
        points = np.array([[1.0, 0.2], [-0.5, 0.9]])
        bases = selector(points @ frame.vectors.T, points)
        for x, basis in zip(points, bases):
            assert tuple(sorted(basis)) == most_correlated_basis(frame, x).indices


class TestTrajectory:
    """Tests de la trajectoire alpha^(k)"""

    def test_monotone(self, triangle):
        """Test de la décroissance coordonnée par coordonnée"""
        trajectory = bias_trajectory(triangle, DomainSpec.ball(2), [0, 10, 100, 1000, 10_000], seed=5)
        for (_, previous), (_, current) in zip(trajectory, trajectory[1:]):
            assert np.all(current <= previous)

    def test_monotone_random_frames(self):
        """Test de la décroissance sur 1000 frames gaussiennes et graines tirées"""
        rng = np.random.default_rng(15)
        for _ in range(1000):
            n = int(rng.integers(2, 4))
            m = int(rng.integers(n + 1, 2 * n + 3))
            frame = gaussian_frame(n, m, rng)
            checkpoints = sorted({0, *rng.integers(1, 200, size=3).tolist()})
            trajectory = bias_trajectory(frame, DomainSpec.ball(n), checkpoints, seed=int(rng.integers(1 << 31)))
            assert [k for k, _ in trajectory] == checkpoints
            for (_, previous), (_, current) in zip(trajectory, trajectory[1:]):
                assert np.all(current <= previous)

    def test_matches_estimate(self, triangle):
        """Test de la cohérence avec l'estimation de même graine"""
        domain = DomainSpec.ball(2)
        trajectory = bias_trajectory(triangle, domain, [500, 2000], seed=6)
        estimate = sampling_bias_estimate(triangle, domain, 2000, seed=6, workers=1)
        assert np.array_equal(trajectory[-1][1], estimate.values)

    def test_negative_checkpoint(self, triangle):
        """Test du rejet d'un point de contrôle négatif"""
        with pytest.raises(ValueError):
            bias_trajectory(triangle, DomainSpec.ball(2), [-1, 10], seed=0)


class TestStoppingVariant:
    """Tests de la variante à arrêt"""

    @pytest.mark.parametrize("seed", range(5))
    def test_converges_near_half(self, triangle, seed):
        """Test de l'arrêt près de -1/2 pour epsilon = 1e-4 et des fenêtres de 1000 points"""
        estimate = stopping_variant(triangle, DomainSpec.ball(2), 1e-4, 1000, seed=seed, max_N=10**7)
        assert np.allclose(estimate.values, -0.5, atol=5e-3)
        assert estimate.metadata["converged"]

    def test_infinite_epsilon(self, triangle):
        """Test de l'arrêt après une seule fenêtre"""
        estimate = stopping_variant(triangle, DomainSpec.ball(2), np.inf, 1000, seed=0, max_N=100_000)
        assert estimate.metadata["N"] == 1000

    def test_max_samples(self, triangle):
        """Test du plafond d'échantillons pour epsilon = 0"""
        estimate = stopping_variant(triangle, DomainSpec.ball(2), 0.0, 300, seed=0, max_N=1000)
        assert estimate.metadata["N"] == 1000
        assert not estimate.metadata["converged"]

    def test_invalid_arguments(self, triangle):
        """Test des paramètres invalides"""
        with pytest.raises(ValueError):
            stopping_variant(triangle, DomainSpec.ball(2), -1.0, 10, seed=0, max_N=100)
        with pytest.raises(ValueError):
            stopping_variant(triangle, DomainSpec.ball(2), 0.1, 0, seed=0, max_N=100)


class TestConstantBias:
    """Tests du biais constant maximal"""

    def test_triangle_sphere(self, triangle):
        """Test du triangle sur la sphère"""
        value = constant_bias_estimate(triangle, DomainSpec.sphere(2), 100_000, seed=0)
        assert value == pytest.approx(-0.5, abs=5e-3)

    @pytest.mark.parametrize("n", [2, 3, 4])
    def test_basis_ball(self, n):
        """Test de la base canonique sur B_r : -r"""
        r = 1.5
        value = constant_bias_estimate(standard_basis(n), DomainSpec.ball(n, r), 100_000, seed=1)
        assert value == pytest.approx(-r, abs=5e-3)
        assert value >= -r

    def test_single_point_cloud(self, triangle):
        """Test d'un nuage réduit à un point"""
        x = np.array([0.3, 0.4])
        value = constant_bias_estimate(triangle, DomainSpec.sample_cloud([x]), 1, seed=0)
        assert value == pytest.approx(most_correlated_basis(triangle, x).value)

    def test_no_samples(self, triangle):
        """Test de N = 0"""
        assert np.isinf(constant_bias_estimate(triangle, DomainSpec.ball(2), 0, seed=0))
