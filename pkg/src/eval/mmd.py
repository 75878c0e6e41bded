from typing import List, Optional, Sequence
import numpy as np

from ..models import KernelSpec
from ..utils import RangeError
from .kernels import gram_matrix


def mmd(samples_g: Sequence[np.ndarray], samples_r: Sequence[np.ndarray], kernel: KernelSpec) -> float:
    """Biased squared-MMD estimate (V-statistic).

    mean k(g, g') + mean k(r, r') − 2 mean k(g, r), every double sum taken
    over all pairs including the diagonal.

    Raises:
        RangeError: either sample set is empty.
    """
    if len(samples_g) == 0 or len(samples_r) == 0:
        raise RangeError("MMD needs two nonempty sample sets")
    g: List[np.ndarray] = [np.asarray(x, dtype=np.float64) for x in samples_g]
    r: List[np.ndarray] = [np.asarray(x, dtype=np.float64) for x in samples_r]
    k_gg = gram_matrix(g, g, kernel).mean()
    k_rr = gram_matrix(r, r, kernel).mean()
    k_gr = gram_matrix(g, r, kernel).mean()
    return float(k_gg + k_rr - 2.0 * k_gr)


def median_bandwidth(samples: Sequence[np.ndarray]) -> float:
    """Median pairwise Euclidean distance of the pooled samples (1.0 if degenerate)."""
    X = np.stack([np.ravel(np.asarray(x, dtype=np.float64)) for x in samples])
    diffs = X[:, None, :] - X[None, :, :]
    d = np.sqrt((diffs ** 2).sum(axis=-1))[np.triu_indices(len(X), 1)]
    med = float(np.median(d)) if d.size else 0.0
    return med if med > 1e-12 else 1.0


def ratio_to_baseline(value: float, baseline: float, floor: float = 1e-12) -> Optional[float]:
    """value / baseline, or None when the baseline sits at the numerical floor."""
    if baseline <= floor:
        return None
    return value / baseline
