"""Degree / clustering / orbit / spectrum MMDs and the Ratio aggregate."""
from dataclasses import dataclass, field
from typing import Dict, List, Optional
import numpy as np

from ..graphs import GraphStatistics, compute_statistics
from ..graphs.statistics import CLUSTERING_BINS
from ..models import Graph, KernelSpec
from ..utils import RangeError, logger
from .mmd import mmd, ratio_to_baseline

METRICS = ("degree", "clustering", "orbit", "spectral")

DEFAULT_KERNELS: Dict[str, KernelSpec] = {
    "degree": KernelSpec("total-variation", sigma=1.0),
    "clustering": KernelSpec("earth-mover", sigma=0.1, distance_scaling=float(CLUSTERING_BINS)),
    "orbit": KernelSpec("euclidean", sigma=30.0),
    "spectral": KernelSpec("earth-mover", sigma=1.0),
}


def _normalized(h: np.ndarray) -> np.ndarray:
    total = h.sum()
    return h / total if total > 0 else h


def metric_features(stats: List[GraphStatistics], metric: str) -> List[np.ndarray]:
    if metric == "degree":
        return [_normalized(s.degree_histogram) for s in stats]
    if metric == "clustering":
        return [_normalized(s.clustering_histogram) for s in stats]
    if metric == "orbit":
        return [s.mean_orbit_counts for s in stats]
    if metric == "spectral":
        return [_normalized(s.spectral_histogram) for s in stats]
    raise RangeError(f"Unknown metric: {metric}")


@dataclass
class BenchmarkResult:
    mmds: Dict[str, float]
    baseline: Dict[str, float] = field(default_factory=dict)
    ratio: Optional[float] = None
    empty_fraction: float = 0.0


def _check_reference(graphs: List[Graph], role: str) -> List[Graph]:
    if not any(g.n for g in graphs):
        raise RangeError(f"{role} set has no nonempty graphs")
    return graphs


def empty_fraction(graphs: List[Graph]) -> float:
    return sum(g.n == 0 for g in graphs) / len(graphs) if graphs else 0.0


def statistics_mmds(stats_g: List[GraphStatistics], stats_r: List[GraphStatistics],
                    kernels: Dict[str, KernelSpec] = None) -> Dict[str, float]:
    kernels = kernels or DEFAULT_KERNELS
    return {m: mmd(metric_features(stats_g, m), metric_features(stats_r, m), kernels[m]) for m in METRICS}


def average_ratio(mmds: Dict[str, float], baseline: Dict[str, float]) -> Optional[float]:
    """Mean of model/baseline over the metrics whose baseline is above the floor."""
    ratios = [ratio_to_baseline(mmds[m], baseline[m]) for m in METRICS if m in baseline]
    ratios = [r for r in ratios if r is not None]
    if not ratios:
        return None
    return float(np.mean(ratios))


def benchmark_metrics(generated: List[Graph], reference: List[Graph], training: Optional[List[Graph]] = None,
                      kernels: Dict[str, KernelSpec] = None, jobs: int = 1) -> BenchmarkResult:
    """Four structural MMDs of generated vs reference graphs.

    With `training`, the baseline is the same four MMDs of training vs
    reference, and Ratio averages model/baseline over the metrics with a
    nonzero baseline.

    Generated graphs with no nodes stay in the sample with all-zero
    statistics, so a model that emits empty graphs is penalized.
    """
    if not generated:
        raise RangeError("generated set is empty")
    stats_r = compute_statistics(_check_reference(reference, "reference"), jobs)
    stats_g = compute_statistics(generated, jobs)
    result = BenchmarkResult(mmds=statistics_mmds(stats_g, stats_r, kernels),
                             empty_fraction=empty_fraction(generated))
    if result.empty_fraction:
        logger.warning("Generated set contains empty graphs", fraction=result.empty_fraction)
    if training is not None:
        stats_t = compute_statistics(_check_reference(training, "training"), jobs)
        result.baseline = statistics_mmds(stats_t, stats_r, kernels)
        result.ratio = average_ratio(result.mmds, result.baseline)
        skipped = [m for m in METRICS if result.baseline[m] <= 1e-12]
        if skipped:
            logger.info("Ratio skips metrics with a zero baseline", metrics=skipped)
    return result
