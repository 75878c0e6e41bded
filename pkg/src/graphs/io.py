"""Newline-delimited JSON graph files.

One graph per line: {"n": int, "edges": [[i, j], ...], "weights": [int, ...]?,
"features": [[float, ...], ...]?}; 0-based node ids with i < j per edge.
"""
import json
from pathlib import Path
from typing import Any, Dict, Iterable, List, Optional, Union
import numpy as np

from ..models import Graph, SpectralData
from ..utils import GraphFormatError, ShapeError, atomic_write


def graph_to_record(g: Graph) -> Dict[str, Any]:
    record: Dict[str, Any] = {"n": g.n, "edges": [[i, j] for i, j in g.edges()]}
    if g.is_weighted:
        record["weights"] = [int(g.adjacency[i, j]) for i, j in g.edges()]
    if g.features is not None:
        record["features"] = g.features.tolist()
    return record


def graph_from_record(record: Any, line: Optional[int] = None, path: Optional[str] = None) -> Graph:
    if not isinstance(record, dict) or "n" not in record or "edges" not in record:
        raise GraphFormatError("expected an object with 'n' and 'edges'", line, path)
    n = record["n"]
    if not isinstance(n, int) or isinstance(n, bool) or n < 0:
        raise GraphFormatError(f"invalid node count {n!r}", line, path)
    edges = record["edges"]
    weights = record.get("weights")
    if not isinstance(edges, list):
        raise GraphFormatError("'edges' must be a list", line, path)
    if weights is not None and (not isinstance(weights, list) or len(weights) != len(edges)):
        raise GraphFormatError("'weights' must align with 'edges'", line, path)
    pairs = []
    for e in edges:
        if not (isinstance(e, list) and len(e) == 2 and all(isinstance(x, int) for x in e)):
            raise GraphFormatError(f"malformed edge {e!r}", line, path)
        i, j = e
        if not (0 <= i < n and 0 <= j < n):
            raise GraphFormatError(f"edge {e!r} has a node index outside [0, {n})", line, path)
        if i >= j:
            raise GraphFormatError(f"edge {e!r} must satisfy i < j", line, path)
        pairs.append((i, j))
    features = record.get("features")
    try:
        feats = np.asarray(features, dtype=np.float64) if features is not None else None
        return Graph.from_edges(n, pairs, weights=weights, features=feats)
    except (ShapeError, ValueError, TypeError) as e:
        raise GraphFormatError(str(e), line, path) from e


def parse_lines(lines: Iterable[str], path: Optional[str] = None) -> List[Graph]:
    graphs = []
    for lineno, text in enumerate(lines, start=1):
        if not text.strip():
            continue
        try:
            record = json.loads(text)
        except json.JSONDecodeError as e:
            raise GraphFormatError(f"invalid JSON ({e.msg})", lineno, path) from e
        graphs.append(graph_from_record(record, lineno, path))
    return graphs


def read_graphs(path: Union[str, Path]) -> List[Graph]:
    with open(path, "r", encoding="utf-8") as f:
        return parse_lines(f, str(path))


def dumps_graphs(graphs: Iterable[Graph]) -> str:
    return "".join(json.dumps(graph_to_record(g), separators=(",", ":")) + "\n" for g in graphs)


def write_graphs(path: Union[str, Path], graphs: Iterable[Graph]) -> Path:
    return atomic_write(path, dumps_graphs(graphs))


def spectrum_to_record(s: SpectralData) -> Dict[str, Any]:
    return {"k": s.k, "lambdas": s.lambdas.tolist(), "frame": s.frame.tolist()}


def read_spectra(path: Union[str, Path]) -> List[SpectralData]:
    spectra = []
    with open(path, "r", encoding="utf-8") as f:
        for lineno, text in enumerate(f, start=1):
            if not text.strip():
                continue
            try:
                record = json.loads(text)
                spectra.append(SpectralData(k=record["k"], lambdas=record["lambdas"], frame=record["frame"]))
            except (json.JSONDecodeError, KeyError, TypeError, ValueError, ShapeError) as e:
                raise GraphFormatError(f"invalid spectrum record ({e})", lineno, str(path)) from e
    return spectra


def write_spectra(path: Union[str, Path], spectra: Iterable[SpectralData]) -> Path:
    return atomic_write(path, "".join(json.dumps(spectrum_to_record(s), separators=(",", ":")) + "\n"
                                      for s in spectra))
