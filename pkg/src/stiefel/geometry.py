"""Canonical-metric geometry of the Stiefel manifold V_k(R^n).

The `*_frame` functions work on raw n x k arrays and are what the training
and sampling loops call in their inner loops; the public operations wrap
them with the StiefelPoint / TangentVector value types.
"""
from typing import Optional
import numpy as np

from ..models import StiefelPoint, TangentVector
from ..numerics import RngState, gaussian_matrix, matrix_exp, orthogonal_log, thin_qr
from ..utils import NonConvergenceError, RangeError, ShapeError

LOG_TOL = 1e-9
LOG_MAX_ITER = 100
TANGENCY_TOL = 1e-6
COINCIDENCE_TOL = 1e-10


def _check_shapes(Z: np.ndarray, Y: np.ndarray):
    if Z.shape != Y.shape:
        raise ShapeError(f"shape {Z.shape} does not match the base frame {Y.shape}")


def tangent_part(Y: np.ndarray, Z: np.ndarray) -> np.ndarray:
    """π_T(Z, Y) = Y(YᵀZ − ZᵀY)/2 + (I − YYᵀ)Z."""
    YtZ = Y.T @ Z
    return Y @ ((YtZ - YtZ.T) / 2.0) + (Z - Y @ YtZ)


def normal_part(Y: np.ndarray, Z: np.ndarray) -> np.ndarray:
    """π_N(Z, Y) = Y(YᵀZ + ZᵀY)/2."""
    YtZ = Y.T @ Z
    return Y @ ((YtZ + YtZ.T) / 2.0)


def exp_frame(U: np.ndarray, V: np.ndarray) -> np.ndarray:
    """Canonical-metric geodesic from U with initial velocity V, evaluated at time 1."""
    if not V.any():
        return U.copy()
    k = U.shape[1]
    A = U.T @ V
    A = (A - A.T) / 2.0
    # rank-deficient normal parts leave zero rows in R; those directions stay frozen
    Q, R = np.linalg.qr(V - U @ (U.T @ V), mode="reduced")
    m = Q.shape[1]
    block = np.zeros((k + m, k + m))
    block[:k, :k] = A
    block[:k, k:] = -R.T
    block[k:, :k] = R
    E = matrix_exp(block)
    return U @ E[:k, :k] + Q @ E[k:, :k]


def _orthogonal_completion(MN: np.ndarray) -> np.ndarray:
    """2k x 2k orthogonal matrix whose first k columns are MN; the completion
    block is Procrustes-aligned so its lower square part is symmetric PSD."""
    k = MN.shape[1]
    full, _ = np.linalg.qr(MN, mode="complete")
    comp = full[:, k:]
    D, _, Rt = np.linalg.svd(comp[k:, :])
    comp = comp @ (Rt.T @ D.T)
    V = np.hstack([MN, comp])
    if np.linalg.det(V) < 0:
        V[:, -1] = -V[:, -1]
    return V


def log_frame(U0: np.ndarray, U1: np.ndarray, tol: float = LOG_TOL,
              max_iter: int = LOG_MAX_ITER) -> np.ndarray:
    """Shooting iteration for the canonical-metric logarithm.

    Raises:
        NonConvergenceError: the completion block did not vanish within
            max_iter iterations; `residual` holds its last Frobenius norm.
        BranchCutError: propagated from the orthogonal logarithm.
    """
    if np.linalg.norm(U1 - U0) == 0.0:
        return np.zeros_like(U0)
    k = U0.shape[1]
    M = U0.T @ U1
    Q, N = np.linalg.qr(U1 - U0 @ M, mode="reduced")
    V = _orthogonal_completion(np.vstack([M, N]))

    residual = np.inf
    for _ in range(max_iter):
        LV = orthogonal_log(V)
        C = LV[k:, k:]
        residual = float(np.linalg.norm(C))
        if residual <= tol:
            A = (LV[:k, :k] - LV[:k, :k].T) / 2.0
            B = LV[k:, :k]
            return U0 @ A + Q @ B
        V[:, k:] = V[:, k:] @ matrix_exp(-C)
    raise NonConvergenceError(
        f"Stiefel log did not converge in {max_iter} iterations", residual=residual
    )


def interpolate_frame(U0: np.ndarray, U1: np.ndarray, t: float,
                      log_u0_u1: Optional[np.ndarray] = None) -> np.ndarray:
    if log_u0_u1 is None:
        log_u0_u1 = log_frame(U0, U1)
    return exp_frame(U0, t * log_u0_u1)


def conditional_field_frame(Ut: np.ndarray, U0: np.ndarray, U1: np.ndarray,
                            log_u0_u1: Optional[np.ndarray] = None) -> np.ndarray:
    """Log(Ut, U1) rescaled to the constant speed ‖Log(U0, U1)‖."""
    if np.linalg.norm(Ut - U1) <= COINCIDENCE_TOL:
        return np.zeros_like(Ut)
    if log_u0_u1 is None:
        log_u0_u1 = log_frame(U0, U1)
    direction = log_frame(Ut, U1)
    length = np.linalg.norm(direction)
    if length == 0.0:
        return np.zeros_like(Ut)
    return direction * (np.linalg.norm(log_u0_u1) / length)


def project_tangent(Z, Y: StiefelPoint) -> TangentVector:
    Z = np.asarray(Z, dtype=np.float64)
    _check_shapes(Z, Y.frame)
    return TangentVector(base=Y, value=tangent_part(Y.frame, Z))


def project_normal(Z, Y: StiefelPoint) -> np.ndarray:
    Z = np.asarray(Z, dtype=np.float64)
    _check_shapes(Z, Y.frame)
    return normal_part(Y.frame, Z)


def _require_base(v: TangentVector, U: StiefelPoint):
    if v.base.frame.shape != U.frame.shape or not np.allclose(v.base.frame, U.frame, atol=1e-12):
        raise ShapeError("tangent vector is not based at the given point")


def stiefel_exp(U: StiefelPoint, v: TangentVector) -> StiefelPoint:
    """Exp(U, v) along the canonical-metric geodesic.

    Raises:
        TangencyError: v violates the tangency condition by more than 1e-6.
    """
    _require_base(v, U)
    v.check(TANGENCY_TOL)
    return StiefelPoint(exp_frame(U.frame, v.value))


def stiefel_log(U0: StiefelPoint, U1: StiefelPoint, tol: float = LOG_TOL,
                max_iter: int = LOG_MAX_ITER) -> TangentVector:
    _check_shapes(U1.frame, U0.frame)
    return TangentVector(base=U0, value=log_frame(U0.frame, U1.frame, tol, max_iter))


def geodesic_distance(U0: StiefelPoint, U1: StiefelPoint) -> float:
    return stiefel_log(U0, U1).norm()


def geodesic_interpolate(U0: StiefelPoint, U1: StiefelPoint, t: float) -> StiefelPoint:
    """ψ_t(U0 | U1) = Exp(U0, t·Log(U0, U1)); ψ_1 is returned as U1 itself."""
    if not 0.0 <= t <= 1.0:
        raise RangeError(f"interpolation time {t} outside [0, 1]")
    _check_shapes(U1.frame, U0.frame)
    if t == 1.0:
        return U1
    return StiefelPoint(interpolate_frame(U0.frame, U1.frame, t))


def conditional_vector_field(Ut: StiefelPoint, U0: StiefelPoint, U1: StiefelPoint,
                             log_u0_u1: Optional[TangentVector] = None) -> TangentVector:
    """u_t(Ut | U1), the velocity of the geodesic conditional path; zero at Ut = U1."""
    _check_shapes(U0.frame, Ut.frame)
    _check_shapes(U1.frame, Ut.frame)
    precomputed = log_u0_u1.value if log_u0_u1 is not None else None
    return TangentVector(base=Ut, value=conditional_field_frame(Ut.frame, U0.frame, U1.frame, precomputed))


def haar_frame(n: int, k: int, rng: RngState) -> np.ndarray:
    if not n >= k >= 1:
        raise RangeError(f"Haar sampling needs n >= k >= 1, got n={n}, k={k}")
    Q, _ = thin_qr(gaussian_matrix(n, k, rng))
    return Q


def haar_sample(n: int, k: int, rng: RngState) -> StiefelPoint:
    """Uniform (Haar) draw: Q factor of a Gaussian n x k matrix with positive-diagonal R."""
    return StiefelPoint(haar_frame(n, k, rng))
