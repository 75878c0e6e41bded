"""Synthetic benchmark families, one generator strategy per family.

A generator draws one candidate graph from an RNG stream and raises
`RejectedSample` when the candidate falls outside the family's contract;
the dataset layer retries with the same stream.
"""
import math
from abc import ABC, abstractmethod
from typing import Any, Dict, Optional, Tuple
import networkx as nx
import numpy as np
from scipy.spatial import Delaunay

from ..graphs import is_connected
from ..models import Graph
from ..numerics import RngState, make_rng, STREAMS
from ..utils import ConfigError


class RejectedSample(Exception):
    """Candidate violates the family contract; draw again."""


class BaseGraphGenerator(ABC):
    """Abstract base for family generators."""
    family: str = ""
    defaults: Dict[str, Any] = {}
    node_range: Tuple[int, int] = (1, 10**6)

    def __init__(self, params: Optional[Dict[str, Any]] = None):
        params = dict(params or {})
        unknown = set(params) - set(self.defaults)
        if unknown:
            raise ConfigError(f"unknown {self.family} parameters: {sorted(unknown)}")
        self.params = {**self.defaults, **params}

    def prepare(self, seed: int):
        """Per-dataset setup shared by all graphs of one generate() call."""

    @abstractmethod
    def sample(self, rng: RngState) -> Graph:
        pass

    def draw(self, rng: RngState) -> Graph:
        g = self.sample(rng)
        lo, hi = self.node_range
        if not lo <= g.n <= hi:
            raise RejectedSample(f"{g.n} nodes outside [{lo}, {hi}]")
        return g


def _upper_edges(mask: np.ndarray, offset_i: int = 0, offset_j: int = 0):
    rows, cols = np.nonzero(mask)
    return [(int(i) + offset_i, int(j) + offset_j) for i, j in zip(rows, cols)]


class CommunitySmallGenerator(BaseGraphGenerator):
    """Two equal communities, dense inside, joined by a few random cross edges."""
    family = "community-small"
    defaults = {"min_nodes": 12, "max_nodes": 20, "p_intra": 0.7, "inter_fraction": 0.05}
    node_range = (12, 20)

    def sample(self, rng: RngState) -> Graph:
        p = self.params
        n = 2 * int(rng.integers(p["min_nodes"] // 2, p["max_nodes"] // 2, endpoint=True))
        half = n // 2
        edges = []
        for offset in (0, half):
            mask = np.triu(rng.random((half, half)) < p["p_intra"], 1)
            edges += _upper_edges(mask, offset, offset)
        inter = math.ceil(p["inter_fraction"] * n)
        for cell in rng.choice(half * half, size=inter, replace=False):
            edges.append((int(cell) // half, half + int(cell) % half))
        g = Graph.from_edges(n, edges)
        if not is_connected(g):
            raise RejectedSample("disconnected community graph")
        return g


class EgoSmallGenerator(BaseGraphGenerator):
    """Radius-1 ego networks cut from one preferential-attachment host graph."""
    family = "ego-small"
    defaults = {"host_nodes": 400, "attachment": 2, "radius": 1, "min_nodes": 4, "max_nodes": 18}
    node_range = (4, 18)
    HOST_STREAM = 999_999

    def __init__(self, params: Optional[Dict[str, Any]] = None):
        super().__init__(params)
        self.host: Optional[nx.Graph] = None

    def prepare(self, seed: int):
        rng = make_rng(seed, STREAMS["dataset"], self.HOST_STREAM)
        self.host = nx.barabasi_albert_graph(self.params["host_nodes"], self.params["attachment"], seed=rng)

    def sample(self, rng: RngState) -> Graph:
        if self.host is None:
            raise RuntimeError("prepare() must run before sampling ego networks")
        center = int(rng.integers(0, self.host.number_of_nodes()))
        ego = nx.ego_graph(self.host, center, radius=self.params["radius"])
        if not self.params["min_nodes"] <= ego.number_of_nodes() <= self.params["max_nodes"]:
            raise RejectedSample(f"ego network of {ego.number_of_nodes()} nodes")
        return Graph.from_networkx(ego)


class PlanarGenerator(BaseGraphGenerator):
    """Delaunay triangulation of uniform points in the unit square."""
    family = "planar"
    defaults = {"num_nodes": 64}
    node_range = (64, 64)

    def sample(self, rng: RngState) -> Graph:
        n = self.params["num_nodes"]
        points = rng.random((n, 2))
        tri = Delaunay(points)
        edges = set()
        for a, b, c in tri.simplices:
            for i, j in ((a, b), (b, c), (a, c)):
                edges.add((int(min(i, j)), int(max(i, j))))
        g = Graph.from_edges(n, sorted(edges))
        if not is_connected(g):
            raise RejectedSample("degenerate triangulation left a node uncovered")
        return g


class SBMGenerator(BaseGraphGenerator):
    """Stochastic block model with 2-5 communities of 20-40 nodes."""
    family = "sbm"
    defaults = {"min_communities": 2, "max_communities": 5, "min_size": 20, "max_size": 40,
                "p_intra": 0.3, "p_inter": 0.005}
    node_range = (44, 192)

    def sample(self, rng: RngState) -> Graph:
        p = self.params
        c = int(rng.integers(p["min_communities"], p["max_communities"], endpoint=True))
        sizes = rng.integers(p["min_size"], p["max_size"], size=c, endpoint=True).tolist()
        if not self.node_range[0] <= sum(sizes) <= self.node_range[1]:
            raise RejectedSample(f"{sum(sizes)} nodes outside the family range")
        probs = np.full((c, c), p["p_inter"])
        np.fill_diagonal(probs, p["p_intra"])
        G = nx.stochastic_block_model(sizes, probs.tolist(), seed=rng)
        g = Graph.from_networkx(G)
        if not is_connected(g):
            raise RejectedSample("disconnected block model sample")
        return g


class GridGenerator(BaseGraphGenerator):
    """w x h square lattices."""
    family = "grid"
    defaults = {"min_side": 10, "max_side": 20, "min_nodes": 100, "max_nodes": 400}
    node_range = (100, 400)

    def sample(self, rng: RngState) -> Graph:
        p = self.params
        w, h = (int(v) for v in rng.integers(p["min_side"], p["max_side"], size=2, endpoint=True))
        if not p["min_nodes"] <= w * h <= p["max_nodes"]:
            raise RejectedSample(f"{w}x{h} lattice outside the node range")
        return Graph.from_networkx(nx.grid_2d_graph(w, h))
