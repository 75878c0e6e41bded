from typing import Callable, Dict, List
import numpy as np
from sklearn.cluster import KMeans

from ..graphs import is_connected, is_planar, normalized_laplacian
from ..models import Graph
from ..numerics import sym_eig
from ..utils import RangeError

SBM_COMMUNITIES = (2, 5)
SBM_COMMUNITY_SIZE = (20, 40)


def is_planar_valid(g: Graph) -> bool:
    return g.n > 0 and is_connected(g) and is_planar(g)


def recover_communities(g: Graph) -> np.ndarray:
    """Spectral clustering: community count c by the largest eigengap among 2..5,
    then k-means on the degree-rescaled rows of the c smallest eigenvectors."""
    w, V = sym_eig(normalized_laplacian(g))
    lo, hi = SBM_COMMUNITIES
    counts = [c for c in range(lo, hi + 1) if c < g.n]
    gaps = [w[c] - w[c - 1] for c in counts]
    c = counts[int(np.argmax(gaps))]
    deg = np.maximum(g.adjacency.sum(axis=1), 1).astype(np.float64)
    embedding = V[:, :c] / np.sqrt(deg)[:, None]
    return KMeans(n_clusters=c, n_init=10, random_state=0).fit_predict(embedding)


def is_sbm_valid(g: Graph) -> bool:
    if g.n <= SBM_COMMUNITIES[1] or not is_connected(g):
        return False
    sizes = np.bincount(recover_communities(g))
    lo, hi = SBM_COMMUNITY_SIZE
    return bool(np.all((sizes >= lo) & (sizes <= hi)))


_VALIDATORS: Dict[str, Callable[[Graph], bool]] = {
    "planar": is_planar_valid,
    "sbm": is_sbm_valid,
}


def supports_validity(family: str) -> bool:
    return family in _VALIDATORS


def validity(generated: List[Graph], family: str) -> float:
    """Percentage of generated graphs that satisfy the family's structural contract.

    Raises:
        RangeError: no validity criterion exists for the family.
    """
    check = _VALIDATORS.get(family)
    if check is None:
        raise RangeError(f"validity is defined for {sorted(_VALIDATORS)}, not {family}")
    if not generated:
        return 0.0
    return 100.0 * sum(check(g) for g in generated) / len(generated)
