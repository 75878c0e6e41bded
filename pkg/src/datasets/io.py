"""Dataset files: graph lists in the JSON-lines format plus a metadata sidecar."""
import json
from dataclasses import asdict
from pathlib import Path
from typing import Any, Dict, List, Tuple, Union

from ..graphs import read_graphs, write_graphs
from ..models import DatasetSpec, Graph
from ..utils import DatasetError, atomic_write

GRAPHS_FILE = "graphs.jsonl"
TRAIN_FILE = "train.jsonl"
TEST_FILE = "test.jsonl"
META_FILE = "meta.json"


def load(path: Union[str, Path]) -> List[Graph]:
    return read_graphs(path)


def save(path: Union[str, Path], dataset: List[Graph]) -> Path:
    return write_graphs(path, dataset)


def save_dataset_dir(out_dir: Union[str, Path], spec: DatasetSpec, graphs: List[Graph],
                     train_idx: List[int], test_idx: List[int]) -> Path:
    """Writes the full dataset, both split files and meta.json into `out_dir`."""
    out = Path(out_dir)
    save(out / GRAPHS_FILE, graphs)
    save(out / TRAIN_FILE, [graphs[i] for i in train_idx])
    save(out / TEST_FILE, [graphs[i] for i in test_idx])
    meta = {
        **asdict(spec),
        "n_max": max((g.n for g in graphs), default=0),
        "train_indices": train_idx,
        "test_indices": test_idx,
    }
    atomic_write(out / META_FILE, json.dumps(meta, indent=2, sort_keys=True) + "\n")
    return out


def read_metadata(data_dir: Union[str, Path]) -> Dict[str, Any]:
    path = Path(data_dir) / META_FILE
    if not path.exists():
        return {}
    try:
        return json.loads(path.read_text(encoding="utf-8"))
    except json.JSONDecodeError as e:
        raise DatasetError(f"{path}: unreadable metadata ({e.msg})") from e


def load_split(data_dir: Union[str, Path]) -> Tuple[List[Graph], List[Graph]]:
    """(train, test) from a directory written by save_dataset_dir."""
    data_dir = Path(data_dir)
    train_path, test_path = data_dir / TRAIN_FILE, data_dir / TEST_FILE
    if not train_path.exists() or not test_path.exists():
        raise DatasetError(f"{data_dir} has no {TRAIN_FILE}/{TEST_FILE}; run gen-data first")
    return load(train_path), load(test_path)
