from concurrent.futures import ThreadPoolExecutor
from typing import Any, Dict, List, Tuple
import numpy as np
from tenacity import RetryError, Retrying, retry_if_exception_type, stop_after_attempt

from ..models import DatasetSpec, Graph
from ..numerics import make_rng, STREAMS
from ..utils import DatasetError, logger
from .generators import (
    BaseGraphGenerator, CommunitySmallGenerator, EgoSmallGenerator, GridGenerator,
    PlanarGenerator, RejectedSample, SBMGenerator,
)
from .io import load, save, save_dataset_dir, load_split, read_metadata

MAX_ATTEMPTS = 1000


class DatasetFactory:
    """Maps family names to their generator strategies."""
    _mapping = {
        "community-small": CommunitySmallGenerator,
        "ego-small": EgoSmallGenerator,
        "planar": PlanarGenerator,
        "sbm": SBMGenerator,
        "grid": GridGenerator,
    }

    @classmethod
    def families(cls) -> List[str]:
        return sorted(cls._mapping)

    @classmethod
    def create(cls, family: str, params: Dict[str, Any] = None) -> BaseGraphGenerator:
        """Creates the generator for a family.

        Raises:
            DatasetError: If the family is not recognized.
        """
        generator_cls = cls._mapping.get(family)
        if not generator_cls:
            raise DatasetError(f"Unknown graph family: {family} (expected one of {cls.families()})")
        return generator_cls(params)


def _draw_one(generator: BaseGraphGenerator, seed: int, index: int) -> Graph:
    rng = make_rng(seed, STREAMS["dataset"], index)
    try:
        for attempt in Retrying(stop=stop_after_attempt(MAX_ATTEMPTS),
                                retry=retry_if_exception_type(RejectedSample)):
            with attempt:
                return generator.draw(rng)
    except RetryError as e:
        raise DatasetError(
            f"{generator.family}: graph {index} rejected {MAX_ATTEMPTS} times "
            f"(last: {e.last_attempt.exception()})"
        ) from e


def generate(spec: DatasetSpec, jobs: int = 1) -> List[Graph]:
    """`spec.count` graphs of one family; graph i uses its own stream, so jobs never changes the output."""
    if spec.count < 0:
        raise DatasetError(f"graph count must be non-negative, got {spec.count}")
    generator = DatasetFactory.create(spec.family, spec.params)
    generator.prepare(spec.seed)
    if jobs <= 1:
        graphs = [_draw_one(generator, spec.seed, i) for i in range(spec.count)]
    else:
        with ThreadPoolExecutor(max_workers=jobs) as executor:
            graphs = list(executor.map(lambda i: _draw_one(generator, spec.seed, i), range(spec.count)))
    logger.info("Dataset generated", family=spec.family, count=len(graphs), seed=spec.seed)
    return graphs


def split_indices(count: int, train_fraction: float = 0.8, seed: int = 0) -> Tuple[List[int], List[int]]:
    if count < 1:
        raise DatasetError("cannot split an empty dataset")
    if not 0.0 < train_fraction < 1.0:
        raise DatasetError(f"train fraction must lie in (0, 1), got {train_fraction}")
    perm = make_rng(seed, STREAMS["split"]).permutation(count)
    n_test = max(1, int(round(count * (1.0 - train_fraction))))
    if count > 1:
        n_test = min(n_test, count - 1)
    n_train = count - n_test
    return sorted(perm[:n_train].tolist()), sorted(perm[n_train:].tolist())


def split(dataset: List[Graph], train_fraction: float = 0.8, seed: int = 0) -> Tuple[List[Graph], List[Graph]]:
    """Deterministic shuffled split; the test side always gets at least one graph."""
    train_idx, test_idx = split_indices(len(dataset), train_fraction, seed)
    return [dataset[i] for i in train_idx], [dataset[i] for i in test_idx]


__all__ = [
    "DatasetFactory", "BaseGraphGenerator", "RejectedSample", "generate", "split", "split_indices",
    "load", "save", "save_dataset_dir", "load_split", "read_metadata", "MAX_ATTEMPTS",
]
