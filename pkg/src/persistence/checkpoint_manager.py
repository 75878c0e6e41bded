import json
from pathlib import Path
from typing import Any, Dict, Union
import numpy as np

from ..flowmatch import VectorFieldNet
from ..utils import CheckpointError, atomic_write, logger

FORMAT = "vector-field/1"
MODEL_FILE = "model.json"


class CheckpointStore:
    """Per-stage network checkpoints in one directory.

    Each stage is `<stage>.json` (architecture + tensor manifest with
    name, shape, dtype and byte offset) plus `<stage>.bin`, the parameters
    as one little-endian float64 blob in manifest order.
    """

    def __init__(self, directory: Union[str, Path]):
        self.directory = Path(directory)

    def _paths(self, stage: str):
        return self.directory / f"{stage}.json", self.directory / f"{stage}.bin"

    def has(self, stage: str) -> bool:
        manifest, blob = self._paths(stage)
        return manifest.exists() and blob.exists()

    def save(self, stage: str, net: VectorFieldNet) -> Path:
        manifest_path, blob_path = self._paths(stage)
        tensors, chunks, offset = [], [], 0
        for name in net.param_names():
            array = np.ascontiguousarray(net.params[name], dtype="<f8")
            tensors.append({"name": name, "shape": list(array.shape), "dtype": "f64", "offset": offset})
            chunks.append(array.tobytes())
            offset += array.nbytes
        manifest = {
            "format": FORMAT,
            "stage": stage,
            "dims": {
                "input_dim": net.input_dim, "output_dim": net.output_dim, "hidden_dim": net.hidden_dim,
                "num_blocks": net.num_blocks, "cond_dim": net.cond_dim,
            },
            "tensors": tensors,
        }
        # blob first: a manifest on disk always points at a complete blob
        atomic_write(blob_path, b"".join(chunks))
        atomic_write(manifest_path, json.dumps(manifest, indent=2) + "\n")
        logger.info("Checkpoint saved", stage=stage, path=str(manifest_path), bytes=offset)
        return manifest_path

    def load(self, stage: str) -> VectorFieldNet:
        """Raises:
            CheckpointError: missing, truncated or inconsistent checkpoint.
        """
        manifest_path, blob_path = self._paths(stage)
        if not self.has(stage):
            raise CheckpointError(f"no checkpoint for stage '{stage}' in {self.directory}", stage=stage)
        try:
            manifest = json.loads(manifest_path.read_text(encoding="utf-8"))
            blob = blob_path.read_bytes()
            params = {}
            for entry in manifest["tensors"]:
                count = int(np.prod(entry["shape"], dtype=np.int64))
                end = entry["offset"] + 8 * count
                if entry["dtype"] != "f64" or end > len(blob):
                    raise CheckpointError(f"tensor {entry['name']} is out of bounds", stage=stage)
                params[entry["name"]] = np.frombuffer(blob, dtype="<f8", count=count,
                                                      offset=entry["offset"]).reshape(entry["shape"]).copy()
            return VectorFieldNet(params=params, **manifest["dims"])
        except CheckpointError:
            raise
        except (KeyError, TypeError, ValueError) as e:
            raise CheckpointError(f"checkpoint for stage '{stage}' is unreadable: {e}", stage=stage) from e

    def save_model_info(self, info: Dict[str, Any]) -> Path:
        return atomic_write(self.directory / MODEL_FILE, json.dumps(info, indent=2, sort_keys=True) + "\n")

    def load_model_info(self) -> Dict[str, Any]:
        path = self.directory / MODEL_FILE
        if not path.exists():
            raise CheckpointError(f"{path} is missing; train the eigenvector stage first", stage="model")
        try:
            info = json.loads(path.read_text(encoding="utf-8"))
        except ValueError as e:
            raise CheckpointError(f"{path} is not valid JSON: {e}", stage="model") from e
        missing = [key for key in ("n_max", "k", "epsilon") if not isinstance(info, dict) or key not in info]
        if missing:
            raise CheckpointError(f"{path} lacks {missing}", stage="model")
        return info
