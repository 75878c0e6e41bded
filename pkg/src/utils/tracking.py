import pandas as pd
from dataclasses import dataclass, asdict
from typing import List, Dict, Optional


@dataclass
class TrainingEntry:
    stage: str
    step: int
    loss: float
    skipped: int = 0  # samples dropped from the batch after failed resampling


class TrainingTracker:
    """Per-step loss ledger shared by the three training stages."""

    def __init__(self):
        self._history: List[TrainingEntry] = []

    def log_step(self, stage: str, step: int, loss: float, skipped: int = 0):
        self._history.append(TrainingEntry(stage=stage, step=step, loss=float(loss), skipped=skipped))

    def get_summary(self, stage: Optional[str] = None) -> pd.DataFrame:
        """Returns the ledger (optionally one stage) as a DataFrame."""
        rows = [asdict(e) for e in self._history if stage is None or e.stage == stage]
        if not rows:
            return pd.DataFrame(columns=["stage", "step", "loss", "skipped"])
        return pd.DataFrame(rows)

    def losses(self, stage: str) -> List[float]:
        return [e.loss for e in self._history if e.stage == stage]

    def window_means(self, stage: str, window: int = 100) -> Dict[str, float]:
        """Mean loss over the first and the last `window` steps of a stage."""
        losses = self.losses(stage)
        if not losses:
            return {}
        head = losses[:window]
        tail = losses[-window:]
        return {"first": sum(head) / len(head), "last": sum(tail) / len(tail)}

    def loss_improved(self, stage: str, window: int = 100) -> bool:
        means = self.window_means(stage, window)
        return bool(means) and means["last"] < means["first"]

    def to_csv(self, stage: Optional[str] = None) -> str:
        """CSV text with a step,loss header, ready for an atomic write."""
        df = self.get_summary(stage)
        return df[["step", "loss", "skipped"]].to_csv(index=False, float_format="%.10g")
