import numpy as np

from ..models import Graph, SpectralData
from ..numerics import sym_eig
from ..utils import RangeError, ShapeError

BOND_BINS = (0.5, 1.5, 2.5)


def normalized_laplacian(g: Graph) -> np.ndarray:
    """L = I - D^{-1/2} A D^{-1/2}.

    Zero-degree nodes get a zero D^{-1/2} entry, so their row and column are
    the identity row/column and each isolated node contributes eigenvalue 1.
    """
    A = g.adjacency.astype(np.float64)
    deg = A.sum(axis=1)
    inv_sqrt = np.zeros_like(deg)
    nz = deg > 0
    inv_sqrt[nz] = 1.0 / np.sqrt(deg[nz])
    L = np.eye(g.n) - inv_sqrt[:, None] * A * inv_sqrt[None, :]
    return (L + L.T) / 2.0


def truncated_spectrum(L: np.ndarray, k: int) -> SpectralData:
    """The k smallest eigenpairs of a symmetric matrix."""
    L = np.asarray(L, dtype=np.float64)
    if L.ndim != 2 or L.shape[0] != L.shape[1]:
        raise ShapeError(f"truncated_spectrum needs a square matrix, got {L.shape}")
    n = L.shape[0]
    if not 1 <= k <= n:
        raise RangeError(f"truncation order k={k} outside [1, {n}]")
    w, V = sym_eig(L)
    return SpectralData(k=k, lambdas=w[:k], frame=V[:, :k])


def graph_spectrum(g: Graph, k: int, n_max: int = None) -> SpectralData:
    """Truncated normalized-Laplacian spectrum of `g`, padded to `n_max` first."""
    if n_max is not None:
        g = pad_graph(g, n_max)
    return truncated_spectrum(normalized_laplacian(g), k)


def pad_graph(g: Graph, n_max: int) -> Graph:
    """Adds isolated nodes until the graph has n_max nodes."""
    if g.n > n_max:
        raise RangeError(f"graph has {g.n} nodes, more than n_max={n_max}")
    if g.n == n_max:
        return g
    adj = np.zeros((n_max, n_max), dtype=np.int64)
    adj[:g.n, :g.n] = g.adjacency
    features = None
    if g.features is not None:
        features = np.zeros((n_max, g.features.shape[1]))
        features[:g.n] = g.features
    return Graph(n=n_max, adjacency=adj, features=features)


def strip_isolated(g: Graph) -> Graph:
    """Removes zero-degree nodes (padding left over after finalization)."""
    keep = np.flatnonzero(g.adjacency.sum(axis=1) > 0)
    if keep.size == g.n:
        return g
    features = g.features[keep] if g.features is not None else None
    return Graph(n=int(keep.size), adjacency=g.adjacency[np.ix_(keep, keep)], features=features)


def reconstruct_laplacian(s: SpectralData) -> np.ndarray:
    """U diag(Λ) Uᵀ, symmetric with rank <= k."""
    M = (s.frame * s.lambdas[None, :]) @ s.frame.T
    return (M + M.T) / 2.0


def _symmetrized(M) -> np.ndarray:
    M = np.asarray(M, dtype=np.float64)
    if M.ndim != 2 or M.shape[0] != M.shape[1]:
        raise ShapeError(f"finalization needs a square matrix, got {M.shape}")
    return (M + M.T) / 2.0


def finalize_binary(M, features=None) -> Graph:
    """Symmetrize, then threshold at 0.5; the diagonal is forced to zero."""
    S = _symmetrized(M)
    A = (S >= 0.5).astype(np.int64)
    np.fill_diagonal(A, 0)
    return Graph(n=S.shape[0], adjacency=A, features=features)


def finalize_bonds(M, features=None) -> Graph:
    """Symmetrize, then quantize to bond orders: <0.5, [0.5,1.5), [1.5,2.5), >=2.5."""
    S = _symmetrized(M)
    A = np.digitize(S, BOND_BINS).astype(np.int64)
    np.fill_diagonal(A, 0)
    return Graph(n=S.shape[0], adjacency=A, features=features)
