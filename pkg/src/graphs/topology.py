import networkx as nx

from ..models import Graph


def is_connected(g: Graph) -> bool:
    """Breadth-first connectivity; the empty graph on zero nodes counts as disconnected."""
    if g.n == 0:
        return False
    return nx.is_connected(g.to_networkx())


def is_planar(g: Graph) -> bool:
    """Exact planarity test (left-right criterion)."""
    planar, _ = nx.check_planarity(g.to_networkx())
    return bool(planar)
