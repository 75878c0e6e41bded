import json
from dataclasses import asdict
from pathlib import Path
from typing import Dict, List, Optional, Tuple, Union
import pandas as pd

from ..models import EvalReport, Graph, KernelSpec, SpectralData
from ..numerics import RngState
from ..utils import atomic_write
from .fidelity import spectral_fidelity
from .isomorphism import uniqueness_novelty
from .metrics import benchmark_metrics
from .validity import supports_validity, validity


def build_report(generated: List[Graph], reference: List[Graph], training: Optional[List[Graph]] = None,
                 family: Optional[str] = None, kernels: Dict[str, KernelSpec] = None, jobs: int = 1,
                 spectra: Optional[Tuple[List[SpectralData], List[SpectralData], List[SpectralData]]] = None,
                 rng: Optional[RngState] = None) -> EvalReport:
    """Assembles every metric that the given inputs allow.

    `spectra` is (generated, reference, training) truncated spectra; `rng`
    drives the random-eigenvalue baseline and is required with it.
    """
    bench = benchmark_metrics(generated, reference, training, kernels, jobs)
    report = EvalReport(
        degree=bench.mmds["degree"],
        clustering=bench.mmds["clustering"],
        orbit=bench.mmds["orbit"],
        spectral=bench.mmds["spectral"],
        ratio=bench.ratio,
        baseline=bench.baseline,
        num_generated=len(generated),
        num_reference=len(reference),
        empty_generated=bench.empty_fraction,
    )
    if training is not None:
        diversity = uniqueness_novelty(generated, training)
        report.uniqueness = diversity.uniqueness
        report.novelty = diversity.novelty
        report.unique_novel = diversity.unique_novel
    if family and supports_validity(family):
        report.validity = validity(generated, family)
    if spectra is not None:
        fidelity = spectral_fidelity(*spectra, rng=rng)
        report.eigenvalue_ratio = fidelity.eigenvalue_ratio
        report.eigenvector_ratio = fidelity.eigenvector_ratio
        report.random_eigenvalue_ratio = fidelity.random_eigenvalue_ratio
    return report


def report_to_json(report: EvalReport) -> str:
    """Key-sorted JSON without timestamps: identical inputs give identical bytes."""
    return json.dumps(asdict(report), indent=2, sort_keys=True) + "\n"


def report_table(report: EvalReport) -> str:
    """One-row text table laid out like the usual benchmark tables."""
    columns = {
        "Deg.": report.degree, "Clus.": report.clustering, "Orbit": report.orbit,
        "Spec.": report.spectral, "Ratio": report.ratio, "Empty": report.empty_generated or None,
        "Uniq.": report.uniqueness, "Nov.": report.novelty, "Uniq.&Nov.": report.unique_novel,
        "Valid": report.validity,
        "Eigval ratio": report.eigenvalue_ratio, "Eigvec ratio": report.eigenvector_ratio,
        "Random eigval ratio": report.random_eigenvalue_ratio,
    }
    row = {name: value for name, value in columns.items() if value is not None}
    df = pd.DataFrame([row], index=["model"])
    return df.to_string(float_format=lambda v: f"{v:.4f}") + "\n"


def write_report(out_path: Union[str, Path], report: EvalReport) -> Tuple[Path, Path]:
    """Writes `<out>` (JSON) and `<out>.txt` (table)."""
    out_path = Path(out_path)
    json_path = atomic_write(out_path, report_to_json(report))
    table_path = atomic_write(out_path.with_name(out_path.name + ".txt"), report_table(report))
    return json_path, table_path
