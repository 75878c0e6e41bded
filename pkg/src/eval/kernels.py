from abc import ABC, abstractmethod
from typing import Dict, List, Sequence
import numpy as np

from ..models import KernelSpec
from ..utils import ConfigError


def pad_to(x: np.ndarray, length: int) -> np.ndarray:
    x = np.asarray(x, dtype=np.float64).reshape(-1)
    if len(x) >= length:
        return x
    return np.concatenate([x, np.zeros(length - len(x))])


class DistanceStrategy(ABC):
    """Abstract base for the distance inside an RBF kernel."""
    @abstractmethod
    def distance(self, x: np.ndarray, y: np.ndarray, spec: KernelSpec) -> float:
        pass


class EarthMoverDistance(DistanceStrategy):
    """1-D EMD between histograms: L1 distance of their cumulative sums.

    Distances are in bin units divided by `distance_scaling`; with a
    `block_size` the vectors are concatenated histograms and the per-block
    EMDs are summed.
    """
    def distance(self, x: np.ndarray, y: np.ndarray, spec: KernelSpec) -> float:
        if spec.block_size:
            xb = x.reshape(-1, spec.block_size)
            yb = y.reshape(-1, spec.block_size)
            d = np.abs(np.cumsum(xb, axis=1) - np.cumsum(yb, axis=1)).sum()
        else:
            d = np.abs(np.cumsum(x) - np.cumsum(y)).sum()
        return float(d / spec.distance_scaling)


class TotalVariationDistance(DistanceStrategy):
    def distance(self, x: np.ndarray, y: np.ndarray, spec: KernelSpec) -> float:
        return float(np.abs(x - y).sum() / 2.0)


class EuclideanDistance(DistanceStrategy):
    def distance(self, x: np.ndarray, y: np.ndarray, spec: KernelSpec) -> float:
        return float(np.linalg.norm(x - y))


_DISTANCES: Dict[str, DistanceStrategy] = {
    "earth-mover": EarthMoverDistance(),
    "total-variation": TotalVariationDistance(),
    "euclidean": EuclideanDistance(),
}


def distance_strategy(spec: KernelSpec) -> DistanceStrategy:
    strategy = _DISTANCES.get(spec.base)
    if strategy is None:
        raise ConfigError(f"Unknown kernel base distance: {spec.base}")
    return strategy


def rbf(x: np.ndarray, y: np.ndarray, spec: KernelSpec) -> float:
    """exp(−d(x, y)² / (2σ²))."""
    d = distance_strategy(spec).distance(x, y, spec)
    return float(np.exp(-d * d / (2.0 * spec.sigma ** 2)))


def common_length(*sample_sets: Sequence[np.ndarray], block_size: int = None) -> int:
    length = max((len(np.ravel(x)) for s in sample_sets for x in s), default=0)
    if block_size:
        length = -(-length // block_size) * block_size
    return length


def gram_matrix(X: List[np.ndarray], Y: List[np.ndarray], spec: KernelSpec) -> np.ndarray:
    """K[i, j] = rbf(X[i], Y[j]); vectors are zero-padded to a common length first."""
    length = common_length(X, Y, block_size=spec.block_size)
    Xp = [pad_to(x, length) for x in X]
    Yp = [pad_to(y, length) for y in Y]
    K = np.empty((len(Xp), len(Yp)))
    for i, x in enumerate(Xp):
        for j, y in enumerate(Yp):
            K[i, j] = rbf(x, y, spec)
    return K
