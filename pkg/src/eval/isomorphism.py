from collections import defaultdict
from dataclasses import dataclass
from typing import Dict, List
import networkx as nx

from ..models import Graph

WL_ITERATIONS = 3


def wl_hash(G: nx.Graph) -> str:
    return nx.weisfeiler_lehman_graph_hash(G, iterations=WL_ITERATIONS)


class IsomorphismIndex:
    """Isomorphism classes bucketed by colour-refinement hash; exact checks only inside a bucket."""

    def __init__(self):
        self._buckets: Dict[str, List[nx.Graph]] = defaultdict(list)

    def find(self, G: nx.Graph, h: str = None) -> bool:
        h = h or wl_hash(G)
        return any(nx.is_isomorphic(G, H) for H in self._buckets.get(h, []))

    def add(self, G: nx.Graph) -> bool:
        """Adds G; returns False if an isomorphic graph was already present."""
        h = wl_hash(G)
        if self.find(G, h):
            return False
        self._buckets[h].append(G)
        return True


@dataclass
class DiversityScores:
    uniqueness: float
    novelty: float
    unique_novel: float


def uniqueness_novelty(generated: List[Graph], training: List[Graph]) -> DiversityScores:
    """Percentages: distinct classes among generated, generated graphs absent from training,
    and generated graphs that open a new class that is also absent from training."""
    if not generated:
        return DiversityScores(0.0, 0.0, 0.0)
    train_index = IsomorphismIndex()
    for g in training:
        train_index.add(g.to_networkx())
    seen = IsomorphismIndex()
    unique = novel = unique_novel = 0
    for g in generated:
        G = g.to_networkx()
        is_new = seen.add(G)
        is_novel = not train_index.find(G)
        unique += is_new
        novel += is_novel
        unique_novel += is_new and is_novel
    N = len(generated)
    return DiversityScores(100.0 * unique / N, 100.0 * novel / N, 100.0 * unique_novel / N)
