from .laplacian import (
    normalized_laplacian, truncated_spectrum, graph_spectrum, pad_graph, strip_isolated,
    reconstruct_laplacian, finalize_binary, finalize_bonds,
)
from .statistics import GraphStatistics, graph_statistics, compute_statistics
from .topology import is_connected, is_planar
from .orbits import count_orbits, graphlet_counts, NUM_ORBITS
from .io import (
    read_graphs, write_graphs, dumps_graphs, parse_lines, graph_to_record, graph_from_record,
    read_spectra, write_spectra,
)

__all__ = [
    "normalized_laplacian", "truncated_spectrum", "graph_spectrum", "pad_graph", "strip_isolated",
    "reconstruct_laplacian", "finalize_binary", "finalize_bonds",
    "GraphStatistics", "graph_statistics", "compute_statistics",
    "is_connected", "is_planar", "count_orbits", "graphlet_counts", "NUM_ORBITS",
    "read_graphs", "write_graphs", "dumps_graphs", "parse_lines", "graph_to_record", "graph_from_record",
    "read_spectra", "write_spectra",
]
