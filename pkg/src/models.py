from dataclasses import dataclass, field
from typing import Literal, Dict, Any, List, Optional, Tuple
import numpy as np
import networkx as nx

from .utils import ShapeError, TangencyError

BOND_ALPHABET = 3  # adjacency entries live in {0, 1, 2, 3}
ORTHONORMALITY_TOL = 1e-6


def _frozen(array: np.ndarray) -> np.ndarray:
    array.setflags(write=False)
    return array


@dataclass(frozen=True)
class Graph:
    """Undirected simple graph: symmetric adjacency with zero diagonal.

    Binary graphs use entries {0, 1}; bond graphs use bond orders {0..3}.
    `features` is an optional n x m node feature matrix.
    """
    n: int
    adjacency: np.ndarray
    features: Optional[np.ndarray] = None

    def __post_init__(self):
        adj = np.asarray(self.adjacency)
        if adj.shape != (self.n, self.n):
            raise ShapeError(f"adjacency shape {adj.shape} does not match n={self.n}")
        if self.n and not np.array_equal(adj, adj.T):
            raise ShapeError("adjacency must be symmetric")
        if self.n and np.any(np.diag(adj) != 0):
            raise ShapeError("adjacency must have a zero diagonal (no self-loops)")
        if adj.size and (adj.min() < 0 or adj.max() > BOND_ALPHABET or not np.all(np.equal(np.mod(adj, 1), 0))):
            raise ShapeError("adjacency entries must be integers in {0, 1, 2, 3}")
        object.__setattr__(self, "adjacency", _frozen(adj.astype(np.int64, copy=True)))
        if self.features is not None:
            feats = np.asarray(self.features, dtype=np.float64)
            if feats.ndim != 2 or feats.shape[0] != self.n:
                raise ShapeError(f"features shape {feats.shape} does not match n={self.n}")
            object.__setattr__(self, "features", _frozen(feats.copy()))

    @classmethod
    def from_edges(cls, n: int, edges: List[Tuple[int, int]], weights: Optional[List[int]] = None,
                   features: Optional[np.ndarray] = None) -> "Graph":
        """Raises ShapeError on repeated edges or weights outside the bond orders 1..3."""
        adj = np.zeros((n, n), dtype=np.int64)
        for idx, (i, j) in enumerate(edges):
            w = 1 if weights is None else weights[idx]
            if isinstance(w, bool) or not isinstance(w, (int, float, np.integer, np.floating)) \
                    or not float(w).is_integer() or not 1 <= w <= BOND_ALPHABET:
                raise ShapeError(f"edge ({i}, {j}) has weight {w!r}; expected an integer in 1..{BOND_ALPHABET}")
            if adj[i, j]:
                raise ShapeError(f"edge ({i}, {j}) appears more than once")
            adj[i, j] = adj[j, i] = int(w)
        return cls(n=n, adjacency=adj, features=features)

    @classmethod
    def from_networkx(cls, G: nx.Graph) -> "Graph":
        nodes = sorted(G.nodes())
        index = {v: i for i, v in enumerate(nodes)}
        return cls.from_edges(len(nodes), [(index[u], index[v]) for u, v in G.edges() if u != v])

    @property
    def is_weighted(self) -> bool:
        return bool(self.adjacency.size) and int(self.adjacency.max()) > 1

    @property
    def num_edges(self) -> int:
        return int(np.count_nonzero(np.triu(self.adjacency, 1)))

    def edges(self) -> List[Tuple[int, int]]:
        rows, cols = np.nonzero(np.triu(self.adjacency, 1))
        return [(int(i), int(j)) for i, j in zip(rows, cols)]

    def to_networkx(self) -> nx.Graph:
        G = nx.Graph()
        G.add_nodes_from(range(self.n))
        G.add_edges_from(self.edges())
        return G


@dataclass(frozen=True)
class SpectralData:
    """Truncated spectrum: the k smallest eigenpairs of a normalized Laplacian."""
    k: int
    lambdas: np.ndarray
    frame: np.ndarray

    def __post_init__(self):
        lambdas = np.asarray(self.lambdas, dtype=np.float64).reshape(-1)
        frame = np.asarray(self.frame, dtype=np.float64)
        if lambdas.shape != (self.k,) or frame.ndim != 2 or frame.shape[1] != self.k:
            raise ShapeError(f"spectral data shapes {lambdas.shape}/{frame.shape} disagree with k={self.k}")
        if np.linalg.norm(frame.T @ frame - np.eye(self.k)) > ORTHONORMALITY_TOL:
            raise ShapeError("spectral frame columns are not orthonormal")
        object.__setattr__(self, "lambdas", _frozen(lambdas.copy()))
        object.__setattr__(self, "frame", _frozen(frame.copy()))

    @property
    def n(self) -> int:
        return self.frame.shape[0]


@dataclass(frozen=True)
class StiefelPoint:
    """A point of V_k(R^n): an n x k frame with orthonormal columns."""
    frame: np.ndarray

    def __post_init__(self):
        frame = np.asarray(self.frame, dtype=np.float64)
        if frame.ndim != 2 or frame.shape[0] < frame.shape[1]:
            raise ShapeError(f"Stiefel frame must be n x k with n >= k, got {frame.shape}")
        if np.linalg.norm(frame.T @ frame - np.eye(frame.shape[1])) > ORTHONORMALITY_TOL:
            raise ShapeError("Stiefel frame columns are not orthonormal")
        object.__setattr__(self, "frame", _frozen(frame.copy()))

    @property
    def n(self) -> int:
        return self.frame.shape[0]

    @property
    def k(self) -> int:
        return self.frame.shape[1]


@dataclass(frozen=True)
class TangentVector:
    """A tangent vector at `base`: baseᵀ·value + valueᵀ·base = 0."""
    base: StiefelPoint
    value: np.ndarray

    def __post_init__(self):
        value = np.asarray(self.value, dtype=np.float64)
        if value.shape != self.base.frame.shape:
            raise ShapeError(f"tangent value shape {value.shape} != base shape {self.base.frame.shape}")
        object.__setattr__(self, "value", _frozen(value.copy()))

    def tangency_residual(self) -> float:
        g = self.base.frame.T @ self.value
        return float(np.linalg.norm(g + g.T))

    def check(self, tol: float = 1e-6) -> "TangentVector":
        residual = self.tangency_residual()
        if residual > tol:
            raise TangencyError(f"tangency violated: residual {residual:.3e} > {tol:.1e}")
        return self

    def norm(self) -> float:
        return float(np.linalg.norm(self.value))


@dataclass
class TrainConfig:
    """Hyperparameters of one training stage (steps = optimization steps)."""
    steps: int = 2000
    batch_size: int = 32
    learning_rate: float = 1e-4
    weight_decay: float = 0.01
    hidden_dim: int = 128
    num_blocks: int = 2
    epsilon: float = 0.01
    k: int = 2
    seed: int = 0
    log_every: int = 100

    def __post_init__(self):
        if not (0.0 < self.epsilon <= 1.0):
            raise ValueError(f"epsilon must lie in (0, 1], got {self.epsilon}")
        for name in ("steps", "batch_size", "hidden_dim", "num_blocks", "k"):
            if getattr(self, name) < 1:
                raise ValueError(f"{name} must be positive, got {getattr(self, name)}")


Family = Literal["ego-small", "community-small", "planar", "sbm", "grid"]


@dataclass
class DatasetSpec:
    family: Family
    count: int
    seed: int = 0
    params: Dict[str, Any] = field(default_factory=dict)


@dataclass(frozen=True)
class KernelSpec:
    """Base distance + RBF bandwidth. EMD distances are in bin units / scaling;
    `block_size` splits a concatenated histogram into per-block EMDs."""
    base: Literal["earth-mover", "total-variation", "euclidean"]
    sigma: float
    distance_scaling: float = 1.0
    block_size: Optional[int] = None

    def __post_init__(self):
        if self.sigma <= 0:
            raise ValueError(f"kernel bandwidth must be positive, got {self.sigma}")


@dataclass
class EvalReport:
    """Evaluation outcome; MMD values are squared-MMD estimates."""
    degree: float
    clustering: float
    orbit: float
    spectral: float
    ratio: Optional[float] = None
    baseline: Dict[str, float] = field(default_factory=dict)
    uniqueness: Optional[float] = None
    novelty: Optional[float] = None
    unique_novel: Optional[float] = None
    validity: Optional[float] = None
    eigenvalue_ratio: Optional[float] = None
    eigenvector_ratio: Optional[float] = None
    random_eigenvalue_ratio: Optional[float] = None
    num_generated: int = 0
    num_reference: int = 0
    empty_generated: float = 0.0  # fraction of generated graphs with no nodes
