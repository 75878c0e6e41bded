from .checkpoint_manager import CheckpointStore, MODEL_FILE

__all__ = ["CheckpointStore", "MODEL_FILE"]
