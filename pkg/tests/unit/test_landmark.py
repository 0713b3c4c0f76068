"""
Unit tests for landmark learning
"""

import numpy as np
import pytest

from src.errors import DataError, DegenerateDesignError
from src.kernels import kernel_matrix
from src.kernels.alignment import alignment_spectrum
from src.kernels.landmark import (
    LandmarkDesign,
    landmark_alignment,
    landmark_cross_design,
    landmark_design,
    landmark_fit,
    landmark_predict,
    select_landmarks,
)
from src.kernels.linalg import sym_eig


class TestSelectLandmarks:
    """Test suite for landmark sampling"""

    def test_full_count_is_permutation(self, rng):
        """Test selecting every row gives a permutation"""
        indices = select_landmarks(10, 10, rng)
        assert sorted(indices) == list(range(10))

    def test_distinct(self, rng):
        """Test landmarks are drawn without replacement"""
        indices = select_landmarks(50, 20, rng)
        assert len(set(indices.tolist())) == 20

    def test_same_seed_same_rows(self):
        """Test equal seeds select the same rows"""
        a = select_landmarks(100, 10, np.random.default_rng(5))
        b = select_landmarks(100, 10, np.random.default_rng(5))
        assert np.array_equal(a, b)

    @pytest.mark.parametrize("count", [0, 11])
    def test_out_of_range(self, rng, count):
        """Test counts outside [1, n] are rejected"""
        with pytest.raises(DataError):
            select_landmarks(10, count, rng)


class TestLandmarkFit:
    """Test suite for the least-squares landmark predictor"""

    def test_identity_design_returns_targets(self):
        """Test an identity design returns Y as coefficients"""
        Y = np.array([1.0, 2.0, -1.0])
        design = LandmarkDesign(np.arange(3), np.eye(3))
        assert np.allclose(landmark_fit(design, Y), Y)

    def test_zero_target(self, rng):
        """Test a zero target gives zero coefficients"""
        design = LandmarkDesign(np.arange(3), rng.uniform(size=(10, 3)))
        assert np.allclose(landmark_fit(design, np.zeros(10)), 0.0)

    def test_matches_least_squares(self, rng):
        """Test agreement with numpy least squares"""
        L = rng.uniform(size=(40, 5))
        Y = rng.standard_normal(40)
        expected, *_ = np.linalg.lstsq(L, Y, rcond=None)
        assert np.allclose(landmark_fit(LandmarkDesign(np.arange(5), L), Y), expected, atol=1e-8)

    def test_singular_design_falls_back_to_ridge(self):
        """Test duplicate columns still fit through the ridge fallback"""
        L = np.column_stack([np.ones(6), np.ones(6)])
        coefficients = landmark_fit(LandmarkDesign(np.arange(2), L), np.full(6, 2.0))
        assert np.allclose(L @ coefficients, 2.0, atol=1e-6)

    def test_square_design_interpolates(self, rng):
        """Test a nonsingular square design reproduces the targets"""
        L = rng.uniform(size=(12, 12)) + 4.0 * np.eye(12)
        Y = rng.standard_normal(12)
        coefficients = landmark_fit(LandmarkDesign(np.arange(12), L), Y)
        assert np.allclose(landmark_predict(coefficients, L), Y, rtol=0, atol=1e-9)

    def test_column_permutation_permutes_coefficients(self, rng):
        """Test permuting landmark columns permutes the coefficients"""
        L = rng.uniform(size=(40, 8))
        Y = rng.standard_normal(40)
        perm = rng.permutation(8)
        coefficients = landmark_fit(LandmarkDesign(np.arange(8), L), Y)
        permuted = landmark_fit(LandmarkDesign(perm, L[:, perm]), Y)
        assert np.allclose(permuted, coefficients[perm], rtol=0, atol=1e-9)

    def test_all_zero_design(self):
        """Test an all-zero design is degenerate"""
        with pytest.raises(DegenerateDesignError, match="degenerate design"):
            landmark_fit(LandmarkDesign(np.arange(2), np.zeros((5, 2))), np.ones(5))

    def test_more_landmarks_than_rows(self):
        """Test more landmarks than rows is rejected"""
        with pytest.raises(DataError):
            landmark_fit(LandmarkDesign(np.arange(4), np.ones((3, 4))), np.ones(3))


class TestLandmarkKernel:
    """Test suite for designs built from a kernel"""

    def test_design_columns_come_from_kernel(self, small_forest, friedman_small, rng):
        """Test design columns are the landmark columns of K"""
        K = kernel_matrix(small_forest, friedman_small)
        indices = select_landmarks(K.n, 12, rng)
        design = landmark_design(K, indices)
        assert design.L.shape == (K.n, 12)
        assert np.array_equal(design.L[indices, np.arange(12)], np.ones(12))
        assert np.array_equal(landmark_cross_design(K.values, indices), design.L)

    def test_predict(self):
        """Test prediction is L_rows @ coefficients"""
        assert np.allclose(landmark_predict(np.array([2.0, -1.0]), np.array([[1.0, 1.0]])), [1.0])

    def test_predict_mismatch(self):
        """Test a wrong landmark count is rejected"""
        with pytest.raises(DataError, match="dimension mismatch"):
            landmark_predict(np.ones(2), np.ones((1, 3)))


class TestLandmarkAlignment:
    """Test suite for singular-vector alignment"""

    def test_rank_one_design(self):
        """Test a rank-one design aligns perfectly with its direction"""
        Y = np.array([1.0, 2.0, 3.0, 4.0])
        L = np.column_stack([Y, 2 * Y])
        spectrum = landmark_alignment(LandmarkDesign(np.arange(2), L), Y, 1)
        assert spectrum.alignment[0] == pytest.approx(1.0)
        assert spectrum.values[0] == pytest.approx(np.sqrt(5) * np.linalg.norm(Y))

    def test_values_descending(self, small_forest, friedman_small, rng):
        """Test singular values come out descending"""
        K = kernel_matrix(small_forest, friedman_small)
        design = landmark_design(K, select_landmarks(K.n, 15, rng))
        spectrum = landmark_alignment(design, friedman_small.y, 15)
        assert np.all(np.diff(spectrum.values) <= 1e-12)

    def test_column_permutation_keeps_spectrum(self, rng):
        """Test permuting landmark columns leaves the spectrum unchanged"""
        L = rng.uniform(size=(40, 8))
        Y = rng.standard_normal(40)
        perm = rng.permutation(8)
        a = landmark_alignment(LandmarkDesign(np.arange(8), L), Y, 8)
        b = landmark_alignment(LandmarkDesign(perm, L[:, perm]), Y, 8)
        assert np.allclose(a.values, b.values, rtol=1e-10)
        assert np.allclose(a.alignment, b.alignment, rtol=0, atol=1e-8)

    def test_values_are_root_eigenvalues_of_gram(self, rng):
        """Test squared singular values equal the eigenvalues of L^T L"""
        L = rng.uniform(size=(30, 6))
        spectrum = landmark_alignment(LandmarkDesign(np.arange(6), L), rng.standard_normal(30), 6)
        gram = sym_eig(L.T @ L).eigenvalues
        assert np.allclose(spectrum.values**2, gram, rtol=0, atol=1e-9 * gram[0])

    def test_all_rows_as_landmarks_reproduce_kernel_spectrum(
        self, small_forest, friedman_small, rng
    ):
        """Test using every row as a landmark reproduces the kernel spectrum"""
        K = kernel_matrix(small_forest, friedman_small)
        design = landmark_design(K, select_landmarks(K.n, K.n, rng))
        eig = sym_eig(K.values)
        landmark = landmark_alignment(design, friedman_small.y, 5)
        full = alignment_spectrum(eig.eigenvectors, eig.eigenvalues, friedman_small.y, 5)
        assert np.allclose(landmark.values, full.values, rtol=1e-8)
        assert np.allclose(landmark.alignment, full.alignment, rtol=0, atol=1e-6)

    def test_components_above_landmarks(self):
        """Test more components than landmarks is rejected"""
        with pytest.raises(DataError, match="exceeds"):
            landmark_alignment(LandmarkDesign(np.arange(2), np.eye(4)[:, :2]), np.ones(4), 3)


@pytest.mark.parametrize("seed", range(5))
def test_coefficients_match_normal_equations(seed):
    """Test coefficients match (L^T L)^-1 L^T Y"""
    rng = np.random.default_rng(seed)
    L = rng.uniform(size=(40, 8))
    Y = rng.standard_normal(40)
    expected = np.linalg.inv(L.T @ L) @ L.T @ Y
    coefficients = landmark_fit(LandmarkDesign(np.arange(8), L), Y)
    assert np.allclose(coefficients, expected, rtol=0, atol=1e-7)
