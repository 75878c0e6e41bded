"""Run configuration: shipped YAML defaults, the selected profile, then user overrides.

User files are flat mappings (JSON or YAML); per-stage keys are dotted,
e.g. {"family": "community-small", "eigenvectors.steps": 500}.
"""
from dataclasses import dataclass, field, fields
from pathlib import Path
from typing import Any, Dict, Optional, Union
import yaml

from .models import TrainConfig
from .utils import ConfigError

CONFIG_DIR = Path(__file__).resolve().parent.parent / "config"
DEFAULTS_PATH = CONFIG_DIR / "defaults.yaml"
DATASETS_PATH = CONFIG_DIR / "datasets.yaml"

STAGES = ("eigenvalues", "eigenvectors", "postprocess", "noise-fm")
STAGE_KEYS = ("steps", "batch_size", "learning_rate", "weight_decay", "hidden_dim", "num_blocks", "log_every")
RUN_KEYS = ("family", "data", "out", "k", "epsilon", "seed", "strip_isolated", "pool_size",
            "pool_refresh", "bond_types", "train_fraction", "profile")


def _read_yaml(path: Union[str, Path]) -> Dict[str, Any]:
    path = Path(path)
    if not path.exists():
        raise ConfigError(f"config file not found: {path}")
    try:
        with open(path, "r", encoding="utf-8") as f:
            data = yaml.safe_load(f) or {}
    except yaml.YAMLError as e:
        raise ConfigError(f"{path}: not valid YAML/JSON ({e})") from e
    if not isinstance(data, dict):
        raise ConfigError(f"{path}: expected a mapping at the top level")
    return data


def load_family_table(path: Union[str, Path] = DATASETS_PATH) -> Dict[str, Dict[str, Any]]:
    return _read_yaml(path).get("families", {})


@dataclass
class RunConfig:
    family: Optional[str] = None
    data: Optional[str] = None
    out: str = "runs/default"
    k: int = 2
    epsilon: float = 0.01
    seed: int = 0
    strip_isolated: bool = True
    pool_size: int = 256
    pool_refresh: int = 0
    bond_types: bool = False
    train_fraction: float = 0.8
    profile: str = "desk"
    stages: Dict[str, TrainConfig] = field(default_factory=dict)

    def __post_init__(self):
        if self.k < 1:
            raise ConfigError(f"k must be at least 1, got {self.k}")
        if not 0.0 < self.epsilon <= 1.0:
            raise ConfigError(f"epsilon must lie in (0, 1], got {self.epsilon}")
        if self.pool_size < 1:
            raise ConfigError(f"pool_size must be positive, got {self.pool_size}")
        if self.pool_refresh < 0:
            raise ConfigError(f"pool_refresh must be non-negative, got {self.pool_refresh}")

    def stage(self, name: str) -> TrainConfig:
        if name not in self.stages:
            raise ConfigError(f"unknown training stage: {name}")
        return self.stages[name]


def _stage_settings(defaults: Dict[str, Any], profile: str, stage: str, family: Optional[str]) -> Dict[str, Any]:
    profiles = defaults.get("profiles", {})
    if profile not in profiles:
        raise ConfigError(f"unknown profile '{profile}' (expected one of {sorted(profiles)})")
    base = dict(profiles["desk"])
    if profile == "full":
        table_stage = "postprocess" if stage == "noise-fm" else stage
        table = profiles["full"].get(table_stage, {})
        if family not in table:
            raise ConfigError(f"the full profile has no {table_stage} settings for family '{family}'")
        base.update(table[family])
    return base


def load_run_config(path: Optional[Union[str, Path]] = None, overrides: Optional[Dict[str, Any]] = None,
                    defaults_path: Union[str, Path] = DEFAULTS_PATH,
                    datasets_path: Union[str, Path] = DATASETS_PATH) -> RunConfig:
    """Merges defaults.yaml, the user file at `path` and `overrides` (CLI flags).

    Raises:
        ConfigError: unreadable file, unknown key, or an invalid value.
    """
    defaults = _read_yaml(defaults_path)
    user = dict(_read_yaml(path)) if path else {}
    user.update({key: value for key, value in (overrides or {}).items() if value is not None})

    run_values: Dict[str, Any] = dict(defaults.get("run", {}))
    stage_values: Dict[str, Dict[str, Any]] = {s: {} for s in STAGES}
    for key, value in user.items():
        if "." in key:
            stage, option = key.split(".", 1)
            if stage not in STAGES or option not in STAGE_KEYS:
                raise ConfigError(f"unknown config key: {key}")
            stage_values[stage][option] = value
        elif key in RUN_KEYS:
            run_values[key] = value
        else:
            raise ConfigError(f"unknown config key: {key}")

    family = run_values.get("family")
    if "k" not in run_values:
        run_values["k"] = load_family_table(datasets_path).get(family, {}).get("k", 2)
    profile = run_values.get("profile", "desk")

    stages = {}
    for stage in STAGES:
        settings = _stage_settings(defaults, profile, stage, family)
        settings.update(stage_values[stage])
        try:
            stages[stage] = TrainConfig(k=run_values["k"], epsilon=run_values.get("epsilon", 0.01),
                                        seed=run_values.get("seed", 0), **settings)
        except (TypeError, ValueError) as e:
            raise ConfigError(f"invalid {stage} settings: {e}") from e

    known = {f.name for f in fields(RunConfig)}
    try:
        return RunConfig(stages=stages, **{k: v for k, v in run_values.items() if k in known})
    except TypeError as e:
        raise ConfigError(str(e)) from e
