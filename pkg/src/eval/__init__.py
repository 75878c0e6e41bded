from .kernels import DistanceStrategy, EarthMoverDistance, TotalVariationDistance, EuclideanDistance, rbf, gram_matrix
from .mmd import mmd, median_bandwidth, ratio_to_baseline
from .metrics import BenchmarkResult, benchmark_metrics, average_ratio, DEFAULT_KERNELS, METRICS
from .isomorphism import DiversityScores, IsomorphismIndex, uniqueness_novelty
from .validity import validity, is_planar_valid, is_sbm_valid, recover_communities
from .fidelity import FidelityResult, spectral_fidelity, wavelet_signature, random_eigenvalues
from .report import build_report, report_to_json, report_table, write_report

__all__ = [
    "DistanceStrategy", "EarthMoverDistance", "TotalVariationDistance", "EuclideanDistance", "rbf", "gram_matrix",
    "mmd", "median_bandwidth", "ratio_to_baseline",
    "BenchmarkResult", "benchmark_metrics", "average_ratio", "DEFAULT_KERNELS", "METRICS",
    "DiversityScores", "IsomorphismIndex", "uniqueness_novelty",
    "validity", "is_planar_valid", "is_sbm_valid", "recover_communities",
    "FidelityResult", "spectral_fidelity", "wavelet_signature", "random_eigenvalues",
    "build_report", "report_to_json", "report_table", "write_report",
]
