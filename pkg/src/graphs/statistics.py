from dataclasses import dataclass
from concurrent.futures import ThreadPoolExecutor
from typing import List
import networkx as nx
import numpy as np

from ..models import Graph
from .laplacian import normalized_laplacian
from .orbits import count_orbits

CLUSTERING_BINS = 100
SPECTRAL_BINS = 200


@dataclass(frozen=True)
class GraphStatistics:
    """Raw (unnormalized) structural statistics of one graph."""
    n: int
    degree_histogram: np.ndarray
    clustering_histogram: np.ndarray
    orbit_counts: np.ndarray       # summed over nodes, length 15
    spectral_histogram: np.ndarray

    @property
    def mean_orbit_counts(self) -> np.ndarray:
        return self.orbit_counts / max(self.n, 1)


def graph_statistics(g: Graph) -> GraphStatistics:
    """Degree, clustering, orbit and Laplacian-spectrum statistics of a binary graph."""
    G = g.to_networkx()
    degree_hist = np.asarray(nx.degree_histogram(G), dtype=np.float64)
    coeffs = list(nx.clustering(G).values())
    clustering_hist, _ = np.histogram(coeffs, bins=CLUSTERING_BINS, range=(0.0, 1.0))
    orbits = count_orbits(g.adjacency).sum(axis=0).astype(np.float64)
    if g.n:
        eigs = np.clip(np.linalg.eigvalsh(normalized_laplacian(g)), 0.0, 2.0)
    else:
        eigs = np.zeros(0)
    spectral_hist, _ = np.histogram(eigs, bins=SPECTRAL_BINS, range=(0.0, 2.0))
    return GraphStatistics(
        n=g.n,
        degree_histogram=degree_hist,
        clustering_histogram=clustering_hist.astype(np.float64),
        orbit_counts=orbits,
        spectral_histogram=spectral_hist.astype(np.float64),
    )


def compute_statistics(graphs: List[Graph], jobs: int = 1) -> List[GraphStatistics]:
    """graph_statistics over a list; `jobs` > 1 fans out across threads, order preserved."""
    if jobs <= 1:
        return [graph_statistics(g) for g in graphs]
    with ThreadPoolExecutor(max_workers=jobs) as executor:
        return list(executor.map(graph_statistics, graphs))
