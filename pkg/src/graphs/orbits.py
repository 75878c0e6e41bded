"""Node orbit counts for graphlets on 2, 3 and 4 nodes (orbits 0-14).

    0  edge                        (degree)
    1, 2   path on 3 nodes         (end, middle)
    3      triangle
    4, 5   path on 4 nodes         (end, interior)
    6, 7   star                    (leaf, centre)
    8      4-cycle
    9-11   paw / tailed triangle   (pendant, degree-2 triangle node, hub)
    12, 13 diamond                 (degree-2 node, degree-3 node)
    14     4-clique

Connected induced subgraphs are enumerated once each with the ESU scheme
and every node is credited with the orbit it occupies.
"""
from typing import Dict, Iterator, List, Set, Tuple
import numpy as np

NUM_ORBITS = 15

# (edge count, sorted within-subgraph degrees) -> orbit for each degree value
_FOUR_NODE_ORBITS: Dict[Tuple[int, Tuple[int, ...]], Dict[int, int]] = {
    (3, (1, 1, 2, 2)): {1: 4, 2: 5},
    (3, (1, 1, 1, 3)): {1: 6, 3: 7},
    (4, (2, 2, 2, 2)): {2: 8},
    (4, (1, 2, 2, 3)): {1: 9, 2: 10, 3: 11},
    (5, (2, 2, 3, 3)): {2: 12, 3: 13},
    (6, (3, 3, 3, 3)): {3: 14},
}
_THREE_NODE_ORBITS = {2: {1: 1, 2: 2}, 3: {2: 3}}


def _neighbour_sets(adjacency: np.ndarray) -> List[Set[int]]:
    return [set(np.flatnonzero(row).tolist()) for row in adjacency]


def connected_subsets(nbrs: List[Set[int]], size: int) -> Iterator[Tuple[int, ...]]:
    """Every connected node subset of `size` nodes, each exactly once (ESU)."""

    def extend(sub: Tuple[int, ...], closed: Set[int], ext: Set[int], root: int):
        if len(sub) == size:
            yield sub
            return
        ext = set(ext)
        while ext:
            w = min(ext)
            ext.discard(w)
            fresh = {u for u in nbrs[w] if u > root and u not in closed}
            yield from extend(sub + (w,), closed | nbrs[w] | {w}, ext | fresh, root)

    for v in range(len(nbrs)):
        yield from extend((v,), nbrs[v] | {v}, {u for u in nbrs[v] if u > v}, v)


def classify_subset(nbrs: List[Set[int]], nodes: Tuple[int, ...]) -> Dict[int, int]:
    """Maps each node of a connected 3- or 4-node subset to its orbit."""
    members = set(nodes)
    local = {v: len(nbrs[v] & members) for v in nodes}
    edges = sum(local.values()) // 2
    if len(nodes) == 3:
        table = _THREE_NODE_ORBITS[edges]
    else:
        table = _FOUR_NODE_ORBITS[(edges, tuple(sorted(local.values())))]
    return {v: table[d] for v, d in local.items()}


def count_orbits(adjacency: np.ndarray) -> np.ndarray:
    """n x 15 matrix; entry (v, o) counts the graphlets in which v occupies orbit o."""
    adjacency = (np.asarray(adjacency) != 0)
    n = adjacency.shape[0]
    counts = np.zeros((n, NUM_ORBITS), dtype=np.int64)
    if n == 0:
        return counts
    nbrs = _neighbour_sets(adjacency)
    counts[:, 0] = adjacency.sum(axis=1)
    for size in (3, 4):
        for subset in connected_subsets(nbrs, size):
            for v, orbit in classify_subset(nbrs, subset).items():
                counts[v, orbit] += 1
    return counts


def graphlet_counts(node_orbits: np.ndarray) -> Dict[int, int]:
    """Number of graphlet occurrences per orbit (orbit total / orbit multiplicity)."""
    multiplicity = {0: 2, 1: 2, 2: 1, 3: 3, 4: 2, 5: 2, 6: 3, 7: 1, 8: 4,
                    9: 1, 10: 2, 11: 1, 12: 2, 13: 2, 14: 4}
    totals = node_orbits.sum(axis=0)
    return {o: int(totals[o]) // m for o, m in multiplicity.items()}
