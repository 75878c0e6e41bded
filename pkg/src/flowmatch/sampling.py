"""Euler integrators on R^d and on the Stiefel manifold, and the three-stage graph sampler."""
import math
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Callable, List, Optional, Tuple, Union
import numpy as np

from ..graphs import finalize_binary, finalize_bonds, reconstruct_laplacian
from ..models import Graph, SpectralData, StiefelPoint
from ..numerics import RngState, make_rng, STREAMS
from ..stiefel import exp_frame, haar_frame, tangent_part
from ..utils import RangeError, ShapeError, logger
from .network import VectorFieldNet

Field = Callable[[np.ndarray, float], np.ndarray]


def num_steps(epsilon: float) -> int:
    """⌈1/ε⌉, robust to 1/ε landing a rounding error above an integer."""
    if not 0.0 < epsilon <= 1.0:
        raise RangeError(f"step size must lie in (0, 1], got {epsilon}")
    return int(math.ceil(round(1.0 / epsilon, 9)))


def time_grid(epsilon: float) -> np.ndarray:
    return np.minimum(np.arange(num_steps(epsilon)) * epsilon, 1.0)


def integrate_euclidean(field: Field, x0: np.ndarray, epsilon: float) -> np.ndarray:
    x = np.array(x0, dtype=np.float64)
    for t in time_grid(epsilon):
        x = x + epsilon * field(x, float(t))
    return x


def integrate_stiefel(field: Field, U0: np.ndarray, epsilon: float) -> np.ndarray:
    """U <- Exp(U, ε·π_T(V(U, t), U)), one geodesic step per time point."""
    U = np.array(U0, dtype=np.float64)
    for t in time_grid(epsilon):
        U = exp_frame(U, epsilon * tangent_part(U, field(U, float(t))))
    return U


def euler_sample_euclidean(net: VectorFieldNet, x0, epsilon: float = 0.01, cond=None) -> np.ndarray:
    """Integrates the learned field from x0; x0 may be a single vector or a (B, d) batch."""
    x0 = np.asarray(x0, dtype=np.float64)
    single = x0.ndim == 1
    x = integrate_euclidean(lambda x, t: net.forward(x, t, cond), np.atleast_2d(x0), epsilon)
    return x[0] if single else x


def euler_sample_stiefel(net: VectorFieldNet, U0: Union[StiefelPoint, np.ndarray], epsilon: float = 0.01,
                         cond=None) -> Union[StiefelPoint, np.ndarray]:
    frame = U0.frame if isinstance(U0, StiefelPoint) else np.asarray(U0, dtype=np.float64)
    n, k = frame.shape
    if net.input_dim != n * k or net.output_dim != n * k:
        raise ShapeError(f"eigenvector network is built for {net.input_dim} inputs, frame has {n * k}")
    U = integrate_stiefel(lambda U, t: net.forward(U.reshape(1, -1), t, cond)[0].reshape(n, k), frame, epsilon)
    return StiefelPoint(U) if isinstance(U0, StiefelPoint) else U


@dataclass
class SFMGModel:
    """The three trained fields plus the shape metadata sampling needs."""
    eigval_net: VectorFieldNet
    eigvec_net: VectorFieldNet
    post_net: VectorFieldNet
    n_max: int
    k: int
    feature_dim: int = 0
    bond_types: bool = False
    epsilon: float = 0.01


def sample_eigenvalues(net: VectorFieldNet, k: int, rng: RngState, epsilon: float = 0.01) -> np.ndarray:
    return euler_sample_euclidean(net, rng.standard_normal(k), epsilon)


def sample_eigenvectors(net: VectorFieldNet, n: int, lambdas: np.ndarray, rng: RngState,
                        epsilon: float = 0.01) -> np.ndarray:
    """Frame generated from Haar noise, conditioned on the given eigenvalues."""
    return euler_sample_stiefel(net, haar_frame(n, len(lambdas), rng), epsilon, cond=lambdas)


def _split_state(x: np.ndarray, n: int, feature_dim: int) -> Tuple[np.ndarray, Optional[np.ndarray]]:
    M = x[:n * n].reshape(n, n)
    F = x[n * n:].reshape(n, feature_dim) if feature_dim else None
    return M, F


def _finalize(M: np.ndarray, F: Optional[np.ndarray], bond_types: bool) -> Graph:
    return finalize_bonds(M, F) if bond_types else finalize_binary(M, F)


def refine_laplacian(model: SFMGModel, L0: np.ndarray, rng: RngState) -> Graph:
    """Postprocess flow from a reconstructed Laplacian (and Gaussian features) to a graph."""
    n = model.n_max
    parts = [L0.reshape(-1)]
    if model.feature_dim:
        parts.append(rng.standard_normal(n * model.feature_dim))
    x1 = euler_sample_euclidean(model.post_net, np.concatenate(parts), model.epsilon)
    return _finalize(*_split_state(x1, n, model.feature_dim), model.bond_types)


def sfmg_sample(model: SFMGModel, rng: RngState, n: Optional[int] = None, k: Optional[int] = None) -> Graph:
    """Eigenvalues, then eigenvectors conditioned on them, then the postprocess flow."""
    if (n is not None and n != model.n_max) or (k is not None and k != model.k):
        raise ShapeError(f"model generates n={model.n_max}, k={model.k}; requested n={n}, k={k}")
    lambdas = sample_eigenvalues(model.eigval_net, model.k, rng, model.epsilon)
    U = sample_eigenvectors(model.eigvec_net, model.n_max, lambdas, rng, model.epsilon)
    return refine_laplacian(model, reconstruct_laplacian(SpectralData(model.k, lambdas, U)), rng)


def noise_fm_sample(net: VectorFieldNet, n: int, rng: RngState, feature_dim: int = 0,
                    epsilon: float = 0.01, bond_types: bool = False) -> Graph:
    """Ablation sampler: the adjacency flow started from pure Gaussian noise."""
    x0 = rng.standard_normal(n * n + n * feature_dim)
    x1 = euler_sample_euclidean(net, x0, epsilon)
    return _finalize(*_split_state(x1, n, feature_dim), bond_types)


def generate_graphs(sampler: Callable[[RngState], Graph], count: int, seed: int,
                    jobs: int = 1) -> Tuple[List[Graph], List[float]]:
    """`count` samples, sample i drawn from its own stream; returns graphs and per-sample seconds.

    Output order and content do not depend on `jobs`.
    """
    def one(i: int) -> Tuple[Graph, float]:
        start = time.perf_counter()
        g = sampler(make_rng(seed, STREAMS["sampling"], i))
        return g, time.perf_counter() - start

    if jobs <= 1:
        results = [one(i) for i in range(count)]
    else:
        with ThreadPoolExecutor(max_workers=jobs) as executor:
            results = list(executor.map(one, range(count)))
    graphs = [g for g, _ in results]
    timings = [dt for _, dt in results]
    if timings:
        logger.info("Sampling finished", count=count, mean_seconds=float(np.mean(timings)),
                    std_seconds=float(np.std(timings)))
    return graphs, timings
