import unittest
import numpy as np

from src.models import StiefelPoint, TangentVector
from src.numerics import make_rng
from src.stiefel import (
    conditional_vector_field, exp_frame, geodesic_distance, geodesic_interpolate, haar_frame, haar_sample,
    log_frame, project_normal, project_tangent, stiefel_exp, stiefel_log, tangent_part,
)
from src.utils import NonConvergenceError, RangeError, ShapeError, TangencyError

E1 = StiefelPoint(np.array([[1.0], [0.0]]))


def circle(theta: float) -> StiefelPoint:
    return StiefelPoint(np.array([[np.cos(theta)], [np.sin(theta)]]))


def random_tangent(U: np.ndarray, norm: float, rng) -> np.ndarray:
    v = tangent_part(U, rng.standard_normal(U.shape))
    return v * (norm / np.linalg.norm(v))


def nearby(U0: StiefelPoint, distance: float, rng) -> StiefelPoint:
    return StiefelPoint(exp_frame(U0.frame, random_tangent(U0.frame, distance, rng)))


def orthonormality(U: np.ndarray) -> float:
    return float(np.linalg.norm(U.T @ U - np.eye(U.shape[1])))


class TestProjections(unittest.TestCase):
    # ========== PROJECTION TESTS ==========
    def test_base_point_projects_to_zero(self):
        Y = haar_sample(5, 2, make_rng(0))
        np.testing.assert_allclose(project_tangent(Y.frame, Y).value, np.zeros((5, 2)), atol=1e-12)
        np.testing.assert_allclose(project_normal(Y.frame, Y), Y.frame, atol=1e-12)

    def test_circle_projection(self):
        v = project_tangent(np.array([[0.3], [-1.7]]), E1)
        np.testing.assert_allclose(v.value, [[0.0], [-1.7]])

    def test_decomposition_and_idempotence(self):
        rng = make_rng(1)
        for _ in range(10):
            Y = haar_sample(7, 3, rng)
            Z = rng.standard_normal((7, 3))
            T = project_tangent(Z, Y)
            N = project_normal(Z, Y)
            self.assertLessEqual(np.linalg.norm(T.value + N - Z), 1e-12)
            self.assertLessEqual(T.tangency_residual(), 1e-8)
            np.testing.assert_allclose(project_tangent(T.value, Y).value, T.value, atol=1e-10)
            np.testing.assert_allclose(project_normal(T.value, Y), np.zeros((7, 3)), atol=1e-10)

    def test_shape_mismatch(self):
        with self.assertRaises(ShapeError):
            project_tangent(np.zeros((3, 1)), E1)


class TestExpLog(unittest.TestCase):
    # ========== EXPONENTIAL TESTS ==========
    def test_exp_of_zero(self):
        U = haar_sample(6, 2, make_rng(2))
        out = stiefel_exp(U, TangentVector(U, np.zeros((6, 2))))
        np.testing.assert_allclose(out.frame, U.frame, atol=1e-15)

    def test_exp_on_circle(self):
        theta = 1.2
        out = stiefel_exp(E1, TangentVector(E1, [[0.0], [theta]]))
        np.testing.assert_allclose(out.frame, circle(theta).frame, atol=1e-12)

    def test_exp_preserves_manifold(self):
        rng = make_rng(3)
        for _ in range(20):
            U = haar_frame(8, 3, rng)
            self.assertLessEqual(orthonormality(exp_frame(U, random_tangent(U, 0.3, rng))), 1e-8)

    def test_exp_rejects_non_tangent(self):
        with self.assertRaises(TangencyError):
            stiefel_exp(E1, TangentVector(E1, [[1.0], [0.0]]))

    def test_exp_rejects_foreign_base(self):
        with self.assertRaises(ShapeError):
            stiefel_exp(E1, TangentVector(circle(0.5), [[0.0], [0.0]]))

    # ========== LOGARITHM TESTS ==========
    def test_log_of_same_point(self):
        U = haar_sample(5, 2, make_rng(4))
        np.testing.assert_array_equal(stiefel_log(U, U).value, np.zeros((5, 2)))

    def test_log_on_circle(self):
        v = stiefel_log(E1, circle(0.8))
        np.testing.assert_allclose(v.value, [[0.0], [0.8]], atol=1e-9)
        self.assertAlmostEqual(geodesic_distance(E1, circle(0.8)), 0.8, places=9)

    def test_exp_log_round_trip(self):
        rng = make_rng(5)
        for _ in range(100):
            U0 = haar_frame(8, 2, rng)
            v = random_tangent(U0, rng.uniform(0.05, 0.5 * np.pi), rng)
            recovered = log_frame(U0, exp_frame(U0, v))
            self.assertLessEqual(np.linalg.norm(recovered - v), 1e-6)

    def test_log_result_is_tangent(self):
        rng = make_rng(6)
        U0 = haar_sample(6, 3, rng)
        U1 = nearby(U0, 1.0, rng)
        self.assertLessEqual(stiefel_log(U0, U1).tangency_residual(), 1e-8)

    def test_log_iteration_budget(self):
        rng = make_rng(7)
        U0 = haar_frame(8, 2, rng)
        U1 = exp_frame(U0, random_tangent(U0, 1.0, rng))
        with self.assertRaises(NonConvergenceError) as ctx:
            log_frame(U0, U1, tol=0.0, max_iter=2)
        self.assertGreater(ctx.exception.residual, 0.0)


class TestGeodesics(unittest.TestCase):
    # ========== INTERPOLATION TESTS ==========
    def test_endpoints(self):
        rng = make_rng(8)
        U0 = haar_sample(6, 2, rng)
        U1 = nearby(U0, 1.0, rng)
        np.testing.assert_allclose(geodesic_interpolate(U0, U1, 0.0).frame, U0.frame, atol=1e-12)
        self.assertIs(geodesic_interpolate(U0, U1, 1.0), U1)
        end = StiefelPoint(exp_frame(U0.frame, log_frame(U0.frame, U1.frame)))
        np.testing.assert_allclose(end.frame, U1.frame, atol=1e-6)

    def test_quarter_turn_midpoint(self):
        mid = geodesic_interpolate(E1, circle(np.pi / 2), 0.5)
        np.testing.assert_allclose(mid.frame.ravel(), [np.sqrt(0.5), np.sqrt(0.5)], atol=1e-9)

    def test_time_out_of_range(self):
        with self.assertRaises(RangeError):
            geodesic_interpolate(E1, circle(0.3), 1.5)

    def test_constant_speed_and_manifold(self):
        rng = make_rng(9)
        U0 = haar_sample(8, 2, rng)
        U1 = nearby(U0, 1.2, rng)
        total = geodesic_distance(U0, U1)
        for t in np.linspace(0.0, 1.0, 11):
            psi = geodesic_interpolate(U0, U1, float(t))
            self.assertLessEqual(orthonormality(psi.frame), 1e-8)
            self.assertAlmostEqual(geodesic_distance(U0, psi), t * total, delta=1e-5)

    # ========== CONDITIONAL FIELD TESTS ==========
    def test_field_at_start_is_log(self):
        rng = make_rng(10)
        U0 = haar_sample(6, 2, rng)
        U1 = nearby(U0, 1.0, rng)
        u = conditional_vector_field(U0, U0, U1)
        np.testing.assert_allclose(u.value, stiefel_log(U0, U1).value, atol=1e-10)

    def test_field_vanishes_at_target(self):
        rng = make_rng(11)
        U0 = haar_sample(6, 2, rng)
        U1 = nearby(U0, 1.0, rng)
        np.testing.assert_array_equal(conditional_vector_field(U1, U0, U1).value, np.zeros((6, 2)))

    def test_field_keeps_constant_speed(self):
        rng = make_rng(12)
        U0 = haar_sample(8, 2, rng)
        U1 = nearby(U0, 0.9, rng)
        Ut = geodesic_interpolate(U0, U1, 0.4)
        u = conditional_vector_field(Ut, U0, U1)
        self.assertAlmostEqual(u.norm(), geodesic_distance(U0, U1), places=6)
        self.assertLessEqual(u.tangency_residual(), 1e-8)


class TestHaar(unittest.TestCase):
    # ========== HAAR SAMPLING TESTS ==========
    def test_orthonormal(self):
        rng = make_rng(13)
        for n, k in ((3, 1), (6, 2), (10, 10)):
            self.assertLessEqual(orthonormality(haar_frame(n, k, rng)), 1e-10)

    def test_scalar_sign_balance(self):
        rng = make_rng(14)
        signs = np.array([haar_frame(1, 1, rng)[0, 0] for _ in range(10_000)])
        self.assertTrue(np.all(np.abs(signs) == 1.0))
        self.assertAlmostEqual(np.mean(signs > 0), 0.5, delta=0.02)

    def test_rotated_mean_vanishes(self):
        rng = make_rng(15)
        O = np.linalg.qr(make_rng(16).standard_normal((4, 4)))[0]
        total = np.zeros((4, 2))
        for _ in range(10_000):
            total += O @ haar_frame(4, 2, rng)
        self.assertLess(np.abs(total / 10_000).max(), 0.02)

    def test_invalid_shape(self):
        with self.assertRaises(RangeError):
            haar_frame(2, 3, make_rng(0))


if __name__ == "__main__":
    unittest.main()
