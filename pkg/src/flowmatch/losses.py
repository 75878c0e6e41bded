"""Conditional flow-matching regression losses and their parameter gradients.

Batched forms average the squared error over rows; the single-sample forms
are the batch-of-one case.
"""
from typing import Optional, Tuple
import numpy as np

from ..models import StiefelPoint
from ..stiefel import conditional_field_frame, interpolate_frame, log_frame, tangent_part
from ..utils import RangeError, ShapeError
from .network import GradientSet, VectorFieldNet

TARGET_EPS = 1e-12


def straight_line_target(x0: np.ndarray, x1: np.ndarray, t) -> Tuple[np.ndarray, np.ndarray]:
    """x_t on the segment and the rescaled remaining displacement (‖x1−x0‖/‖x1−x_t‖)(x1−x_t).

    Rows where x_t already coincides with x1 take the analytic limit x1 − x0.
    """
    x0 = np.atleast_2d(x0)
    x1 = np.atleast_2d(x1)
    t = np.broadcast_to(np.asarray(t, dtype=np.float64).reshape(-1), (x0.shape[0],))[:, None]
    xt = x0 + t * (x1 - x0)
    remaining = x1 - xt
    rem_norm = np.linalg.norm(remaining, axis=1, keepdims=True)
    full = x1 - x0
    full_norm = np.linalg.norm(full, axis=1, keepdims=True)
    safe = rem_norm > TARGET_EPS
    scale = np.divide(full_norm, rem_norm, out=np.ones_like(rem_norm), where=safe)
    target = np.where(safe, scale * remaining, full)
    return xt, target


def regression_loss(net: VectorFieldNet, x, t, target, cond=None) -> Tuple[float, GradientSet]:
    """Mean squared error between the field at (x, t) and a constant target."""
    pred, cache = net.forward(x, t, cond, keep_cache=True)
    residual = pred - np.atleast_2d(target)
    B = residual.shape[0]
    loss = float(np.sum(residual ** 2) / B)
    return loss, net.backward(cache, 2.0 * residual / B)


def cfm_loss_euclidean(net: VectorFieldNet, x0, x1, t, cond=None) -> Tuple[float, GradientSet]:
    x0 = np.asarray(x0, dtype=np.float64)
    x1 = np.asarray(x1, dtype=np.float64)
    if x0.shape != x1.shape:
        raise ShapeError(f"endpoints differ in shape: {x0.shape} vs {x1.shape}")
    t_arr = np.asarray(t, dtype=np.float64)
    if np.any(t_arr < 0.0) or np.any(t_arr >= 1.0):
        raise RangeError("training time must lie in [0, 1)")
    xt, target = straight_line_target(x0, x1, t_arr)
    return regression_loss(net, xt, t_arr, target, cond)


def stiefel_regression_loss(net: VectorFieldNet, frames: np.ndarray, t, targets: np.ndarray,
                            cond=None) -> Tuple[float, GradientSet]:
    """Loss of tangent-projected predictions against tangent targets.

    frames and targets are (B, n, k); the raw network output is reshaped to
    (n, k) row-major and projected onto the tangent space at each frame.
    """
    B, n, k = frames.shape
    Z, cache = net.forward(frames.reshape(B, n * k), t, cond, keep_cache=True)
    Z = Z.reshape(B, n, k)
    upstream = np.empty_like(Z)
    loss = 0.0
    for b in range(B):
        residual = tangent_part(frames[b], Z[b]) - targets[b]
        loss += float(np.sum(residual ** 2))
        # the projection is self-adjoint, so it maps the residual straight back
        upstream[b] = 2.0 * tangent_part(frames[b], residual) / B
    return loss / B, net.backward(cache, upstream.reshape(B, n * k))


def geodesic_pair(U0: np.ndarray, U1: np.ndarray, t: float) -> Tuple[np.ndarray, np.ndarray]:
    """Point ψ_t(U0|U1) on the geodesic and the conditional velocity there.

    Raises:
        NonConvergenceError / BranchCutError: from the Stiefel logarithm.
    """
    log01 = log_frame(U0, U1)
    Ut = interpolate_frame(U0, U1, t, log01)
    return Ut, conditional_field_frame(Ut, U0, U1, log01)


def cfm_loss_stiefel(net: VectorFieldNet, U0: StiefelPoint, U1: StiefelPoint, t: float,
                     cond: Optional[np.ndarray] = None) -> Tuple[float, GradientSet]:
    if U0.frame.shape != U1.frame.shape:
        raise ShapeError(f"endpoints differ in shape: {U0.frame.shape} vs {U1.frame.shape}")
    if not 0.0 <= t < 1.0:
        raise RangeError(f"training time {t} outside [0, 1)")
    Ut, target = geodesic_pair(U0.frame, U1.frame, t)
    return stiefel_regression_loss(net, Ut[None], t, target[None], cond)
