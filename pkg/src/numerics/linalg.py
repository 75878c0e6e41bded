"""Dense double-precision kernels shared by the graph, manifold and flow code."""
import numpy as np
from scipy.linalg import expm, logm
from typing import Tuple

from ..utils import ShapeError, DegenerateInputError, BranchCutError

SYMMETRY_TOL = 1e-10
ORTHOGONALITY_TOL = 1e-8
BRANCH_CUT_GAP = 1e-6


def _as_matrix(M) -> np.ndarray:
    M = np.asarray(M, dtype=np.float64)
    if M.ndim != 2:
        raise ShapeError(f"expected a matrix, got an array of shape {M.shape}")
    if not np.all(np.isfinite(M)):
        raise ShapeError("matrix has non-finite entries")
    return M


def _require_square(M: np.ndarray, op: str):
    if M.shape[0] != M.shape[1]:
        raise ShapeError(f"{op} needs a square matrix, got {M.shape}")


def fix_signs(V: np.ndarray) -> np.ndarray:
    """Flips columns so that the largest-magnitude entry of each is positive."""
    if V.size == 0:
        return V
    idx = np.argmax(np.abs(V), axis=0)
    signs = np.sign(V[idx, np.arange(V.shape[1])])
    signs[signs == 0] = 1.0
    return V * signs


def sym_eig(M) -> Tuple[np.ndarray, np.ndarray]:
    """Eigendecomposition of a symmetric matrix.

    Returns ascending eigenvalues and orthonormal eigenvectors (columns),
    each eigenvector sign-fixed so its largest-magnitude entry is positive.

    Raises:
        ShapeError: non-square or asymmetric input.
    """
    M = _as_matrix(M)
    _require_square(M, "sym_eig")
    scale = np.linalg.norm(M)
    if np.linalg.norm(M - M.T) > SYMMETRY_TOL * scale:
        raise ShapeError("sym_eig needs a symmetric matrix")
    w, V = np.linalg.eigh((M + M.T) / 2.0)
    return w, fix_signs(V)


def thin_qr(M) -> Tuple[np.ndarray, np.ndarray]:
    """Reduced QR with a strictly positive diagonal on R (unique factorization).

    Raises:
        ShapeError: fewer rows than columns.
        DegenerateInputError: rank-deficient input; `column` names the first
            dependent column.
    """
    M = _as_matrix(M)
    n, k = M.shape
    if n < k:
        raise ShapeError(f"thin_qr needs rows >= cols, got {M.shape}")
    Q, R = np.linalg.qr(M, mode="reduced")
    diag = np.diag(R)
    threshold = 1e-12 * max(np.linalg.norm(M), np.finfo(float).tiny)
    weak = np.flatnonzero(np.abs(diag) <= threshold)
    if weak.size:
        col = int(weak[0])
        raise DegenerateInputError(f"thin_qr: column {col} is linearly dependent on earlier columns", column=col)
    signs = np.sign(diag)
    return Q * signs, R * signs[:, None]


def matrix_exp(M) -> np.ndarray:
    """Matrix exponential (scaling and squaring, degree-13 Padé)."""
    M = _as_matrix(M)
    _require_square(M, "matrix_exp")
    if not M.any():
        return np.eye(M.shape[0])
    return expm(M)


def orthogonal_log(V) -> np.ndarray:
    """Principal logarithm of a rotation: a skew-symmetric S with exp(S) = V.

    Raises:
        DegenerateInputError: V is not orthogonal.
        BranchCutError: V has an eigenvalue at (or within 1e-6 of) -1, where
            the principal real logarithm is undefined.
    """
    V = _as_matrix(V)
    _require_square(V, "orthogonal_log")
    k = V.shape[0]
    if np.linalg.norm(V.T @ V - np.eye(k)) > ORTHOGONALITY_TOL:
        raise DegenerateInputError("orthogonal_log needs an orthogonal matrix")
    if np.linalg.norm(V - np.eye(k)) == 0.0:
        return np.zeros((k, k))
    gap = np.min(np.abs(np.linalg.eigvals(V) + 1.0))
    if gap <= BRANCH_CUT_GAP:
        raise BranchCutError(f"eigenvalue within {gap:.2e} of -1: principal log undefined")
    L = np.real(logm(V))
    return (L - L.T) / 2.0
