import structlog
import os
import sys
import tempfile
from pathlib import Path
from typing import Optional, Union

# Structured Logging Setup
structlog.configure(
    processors=[
        structlog.processors.TimeStamper(fmt="iso"),
        structlog.processors.JSONRenderer(),
    ],
    context_class=dict,
    logger_factory=structlog.PrintLoggerFactory(file=sys.stderr),
    wrapper_class=structlog.BoundLogger,
    cache_logger_on_first_use=True,
)
# Logger Setup
logger = structlog.get_logger()

# ANSI Color Colors
RED = "\033[91m"
RESET = "\033[0m"

# Error Types
class AppError(Exception): pass
class ShapeError(AppError): pass
class RangeError(AppError): pass
class TangencyError(AppError): pass
class DatasetError(AppError): pass
class ConfigError(AppError): pass

class DegenerateInputError(AppError):
    """Raised when a factorization meets a (numerically) dependent column."""
    def __init__(self, message: str, column: Optional[int] = None):
        super().__init__(message)
        self.column = column

class NumericalError(AppError): pass
class BranchCutError(NumericalError): pass

class NonConvergenceError(NumericalError):
    """Iteration budget exhausted; `residual` is the last measured residual."""
    def __init__(self, message: str, residual: float = float("nan")):
        super().__init__(message)
        self.residual = residual

class ParseError(AppError): pass

class GraphFormatError(ParseError):
    """Malformed graph file entry, located by file path and 1-based line."""
    def __init__(self, message: str, line: Optional[int] = None, path: Optional[str] = None):
        location = f"{path or '<stream>'}:{line}" if line is not None else (path or "<stream>")
        super().__init__(f"{location}: {message}")
        self.line = line
        self.path = path

class CheckpointError(AppError):
    """Missing or unreadable checkpoint for a training stage."""
    def __init__(self, message: str, stage: Optional[str] = None):
        super().__init__(message)
        self.stage = stage


def atomic_write(path: Union[str, Path], payload: Union[str, bytes]) -> Path:
    """Writes `payload` next to `path` and renames it into place.

    Readers never observe a half-written file; on failure the temp file is
    removed and the original (if any) is left untouched.
    """
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    mode = "wb" if isinstance(payload, bytes) else "w"
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.", suffix=".tmp")
    try:
        with os.fdopen(fd, mode, **({} if mode == "wb" else {"encoding": "utf-8", "newline": "\n"})) as f:
            f.write(payload)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise
    return path

# Expose sub-modules
from .tracking import TrainingTracker, TrainingEntry

__all__ = [
    "logger", "RED", "RESET", "atomic_write",
    "AppError", "ShapeError", "RangeError", "TangencyError", "DatasetError",
    "ConfigError", "DegenerateInputError", "NumericalError", "BranchCutError",
    "NonConvergenceError", "ParseError", "GraphFormatError", "CheckpointError",
    "TrainingTracker", "TrainingEntry",
]
