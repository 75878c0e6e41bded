import unittest
import numpy as np

from src.numerics import fix_signs, make_rng, matrix_exp, orthogonal_log, stage_rng, sym_eig, thin_qr, gaussian_matrix
from src.utils import BranchCutError, DegenerateInputError, ShapeError


def random_rotation(k: int, angle_scale: float, rng) -> np.ndarray:
    S = rng.standard_normal((k, k))
    S = (S - S.T) / 2.0
    S *= angle_scale / max(np.linalg.norm(S, 2), 1e-12)
    return matrix_exp(S)


class TestNumerics(unittest.TestCase):
    # ========== EIGENDECOMPOSITION TESTS ==========
    def test_sym_eig_diagonal(self):
        w, V = sym_eig(np.diag([3.0, 1.0, 2.0]))
        np.testing.assert_allclose(w, [1.0, 2.0, 3.0])
        np.testing.assert_allclose(np.abs(V), np.eye(3)[:, [1, 2, 0]])

    def test_sym_eig_two_by_two(self):
        w, V = sym_eig(np.array([[1.0, -1.0], [-1.0, 1.0]]))
        np.testing.assert_allclose(w, [0.0, 2.0], atol=1e-12)
        s = 1.0 / np.sqrt(2.0)
        np.testing.assert_allclose(V, [[s, s], [s, -s]], atol=1e-12)

    def test_sym_eig_identity(self):
        w, V = sym_eig(np.eye(3))
        np.testing.assert_allclose(w, [1.0, 1.0, 1.0])
        np.testing.assert_allclose(V, np.eye(3))

    def test_sym_eig_reconstructs_and_fixes_signs(self):
        rng = make_rng(1)
        A = rng.standard_normal((6, 6))
        M = A + A.T
        w, V = sym_eig(M)
        self.assertTrue(np.all(np.diff(w) >= 0))
        np.testing.assert_allclose(V @ np.diag(w) @ V.T, M, atol=1e-10)
        np.testing.assert_allclose(V.T @ V, np.eye(6), atol=1e-10)
        idx = np.argmax(np.abs(V), axis=0)
        self.assertTrue(np.all(V[idx, np.arange(6)] > 0))

    def test_sym_eig_rejects_asymmetric(self):
        with self.assertRaises(ShapeError):
            sym_eig(np.array([[1.0, 2.0], [0.0, 1.0]]))
        with self.assertRaises(ShapeError):
            sym_eig(np.ones((2, 3)))

    def test_fix_signs_zero_column(self):
        V = np.array([[0.0, -1.0], [0.0, 0.5]])
        np.testing.assert_allclose(fix_signs(V), [[0.0, 1.0], [0.0, -0.5]])

    # ========== QR TESTS ==========
    def test_thin_qr_positive_diagonal(self):
        rng = make_rng(2)
        M = rng.standard_normal((7, 3))
        Q, R = thin_qr(M)
        self.assertEqual(Q.shape, (7, 3))
        self.assertTrue(np.all(np.diag(R) > 0))
        np.testing.assert_allclose(Q @ R, M, atol=1e-12)
        np.testing.assert_allclose(Q.T @ Q, np.eye(3), atol=1e-12)

    def test_thin_qr_identity_and_single_column(self):
        Q, R = thin_qr(np.eye(3))
        np.testing.assert_allclose(Q, np.eye(3))
        np.testing.assert_allclose(R, np.eye(3))
        Q, R = thin_qr(np.array([[2.0, 0.0], [0.0, 0.0], [0.0, 3.0]]))
        np.testing.assert_allclose(Q, [[1.0, 0.0], [0.0, 0.0], [0.0, 1.0]], atol=1e-15)
        np.testing.assert_allclose(R, np.diag([2.0, 3.0]), atol=1e-15)

    def test_repeated_calls_are_bit_identical(self):
        rng = make_rng(9)
        M = rng.standard_normal((6, 4))
        S = M @ M.T
        for first, second in ((thin_qr(M), thin_qr(M)), (sym_eig(S), sym_eig(S))):
            for a, b in zip(first, second):
                np.testing.assert_array_equal(a, b)

    def test_thin_qr_rank_deficient(self):
        M = np.array([[1.0, 2.0], [2.0, 4.0], [3.0, 6.0]])
        with self.assertRaises(DegenerateInputError) as ctx:
            thin_qr(M)
        self.assertEqual(ctx.exception.column, 1)

    def test_thin_qr_wide_matrix(self):
        with self.assertRaises(ShapeError):
            thin_qr(np.ones((2, 3)))

    # ========== MATRIX EXPONENTIAL TESTS ==========
    def test_matrix_exp_zero_is_identity(self):
        np.testing.assert_array_equal(matrix_exp(np.zeros((4, 4))), np.eye(4))

    def test_matrix_exp_rotation_generator(self):
        theta = 0.7
        E = matrix_exp(np.array([[0.0, -theta], [theta, 0.0]]))
        np.testing.assert_allclose(E, [[np.cos(theta), -np.sin(theta)], [np.sin(theta), np.cos(theta)]],
                                   atol=1e-14)

    def test_matrix_exp_diagonal_and_skew_orthogonality(self):
        np.testing.assert_allclose(matrix_exp(np.diag([1.0, 2.0])), np.diag([np.e, np.e ** 2]), rtol=1e-14)
        rng = make_rng(3)
        S = rng.standard_normal((5, 5))
        E = matrix_exp(S - S.T)
        np.testing.assert_allclose(E.T @ E, np.eye(5), atol=1e-12)

    def test_matrix_exp_of_commuting_sum(self):
        rng = make_rng(8)
        S = rng.standard_normal((4, 4))
        A = S - S.T
        B = 0.5 * A + 0.3 * A @ A
        np.testing.assert_allclose(matrix_exp(A + B), matrix_exp(A) @ matrix_exp(B), atol=1e-10)
        D1, D2 = np.diag([0.5, -1.0, 2.0]), np.diag([1.5, 0.2, -0.7])
        np.testing.assert_allclose(matrix_exp(D1 + D2), matrix_exp(D1) @ matrix_exp(D2), rtol=1e-12)

    # ========== ORTHOGONAL LOG TESTS ==========
    def test_orthogonal_log_identity(self):
        np.testing.assert_array_equal(orthogonal_log(np.eye(3)), np.zeros((3, 3)))

    def test_orthogonal_log_inverts_exp(self):
        rng = make_rng(4)
        for _ in range(20):
            V = random_rotation(4, 2.5, rng)
            S = orthogonal_log(V)
            np.testing.assert_allclose(S, -S.T, atol=1e-12)
            np.testing.assert_allclose(matrix_exp(S), V, atol=1e-10)

    def test_orthogonal_log_planar_rotation(self):
        theta = 1.1
        V = np.array([[np.cos(theta), -np.sin(theta)], [np.sin(theta), np.cos(theta)]])
        np.testing.assert_allclose(orthogonal_log(V), [[0.0, -theta], [theta, 0.0]], atol=1e-12)

    def test_orthogonal_log_branch_cut(self):
        with self.assertRaises(BranchCutError):
            orthogonal_log(np.diag([-1.0, -1.0, 1.0]))

    def test_orthogonal_log_rejects_non_orthogonal(self):
        with self.assertRaises(DegenerateInputError):
            orthogonal_log(np.array([[1.0, 0.1], [0.0, 1.0]]))

    # ========== RNG TESTS ==========
    def test_streams_are_reproducible_and_independent(self):
        a = make_rng(7, 1, 2).standard_normal(5)
        b = make_rng(7, 1, 2).standard_normal(5)
        c = make_rng(7, 1, 3).standard_normal(5)
        np.testing.assert_array_equal(a, b)
        self.assertFalse(np.allclose(a, c))

    def test_gaussian_moments(self):
        sample = gaussian_matrix(1000, 100, make_rng(11))
        self.assertLess(abs(sample.mean()), 0.02)
        self.assertLess(abs(sample.var() - 1.0), 0.03)

    def test_stage_rng_and_gaussian_matrix(self):
        np.testing.assert_array_equal(stage_rng(0, "eigenvalues").random(3), make_rng(0, 0).random(3))
        self.assertEqual(gaussian_matrix(4, 2, make_rng(0)).shape, (4, 2))
        with self.assertRaises(ValueError):
            gaussian_matrix(0, 2, make_rng(0))


if __name__ == "__main__":
    unittest.main()
