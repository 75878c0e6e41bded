"""Desk-scale quality checks on community-small.

Trains every stage with the desk profile, samples 100 graphs and checks:
  - degree MMD <= 0.05 and spectral MMD <= 0.08, both below the
    noise-started ablation trained with the same budget,
  - mean edge count of the samples within 30% of the training mean,
  - the uniform random-eigenvalue baseline scores at least twice the
    eigenvalue MMD ratio of the trained model,
  - 10 graphs sample in under 5 seconds,
  - a model trained on a single graph reproduces it (up to isomorphism)
    in at least 12 of 20 samples.

Takes several minutes on a laptop CPU. Exit status 1 when a check fails.
"""
import argparse
import os
import sys

import networkx as nx
import numpy as np

# Add src to path
sys.path.append(os.path.abspath('.'))

from src.config import load_family_table, load_run_config
from src.datasets import generate, split
from src.eval import benchmark_metrics, spectral_fidelity
from src.flowmatch import (
    SFMGModel, generate_graphs, noise_fm_baseline, noise_fm_sample, sample_eigenvalues, sample_eigenvectors,
    sfmg_sample, train_eigenvalues, train_eigenvectors, train_postprocess,
)
from src.graphs import graph_spectrum, strip_isolated
from src.models import DatasetSpec, SpectralData
from src.numerics import STREAMS, make_rng
from src.utils import logger

FAMILY = "community-small"
NUM_SAMPLES = 100


def report(ok: bool, message: str) -> bool:
    print(f"[{'PASS' if ok else 'FAIL'}] {message}")
    return ok


def train_model(graphs, rc):
    n_max = max(g.n for g in graphs)
    spectra = [graph_spectrum(g, rc.k, n_max) for g in graphs]
    eigval_net = train_eigenvalues(spectra, rc.stage("eigenvalues"))
    eigvec_net = train_eigenvectors(spectra, rc.stage("eigenvectors"))
    post_net = train_postprocess(graphs, eigval_net, eigvec_net, rc.stage("postprocess"), n_max, rc.pool_size)
    return SFMGModel(eigval_net, eigvec_net, post_net, n_max=n_max, k=rc.k, epsilon=rc.epsilon)


def check_structure(model, rc, train, test, seed):
    sampled, _ = generate_graphs(lambda rng: sfmg_sample(model, rng), NUM_SAMPLES, seed)
    noise_net = noise_fm_baseline(train, rc.stage("noise-fm"), model.n_max)
    noise, _ = generate_graphs(lambda rng: noise_fm_sample(noise_net, model.n_max, rng, epsilon=rc.epsilon),
                               NUM_SAMPLES, seed)
    ours = benchmark_metrics([strip_isolated(g) for g in sampled], test, train).mmds
    ablation = benchmark_metrics([strip_isolated(g) for g in noise], test, train).mmds

    edges = float(np.mean([g.num_edges for g in sampled]))
    expected = float(np.mean([g.num_edges for g in train]))
    return [
        report(ours["degree"] <= 0.05, f"degree MMD {ours['degree']:.4f} (limit 0.05)"),
        report(ours["spectral"] <= 0.08, f"spectral MMD {ours['spectral']:.4f} (limit 0.08)"),
        report(ours["degree"] < ablation["degree"] and ours["spectral"] < ablation["spectral"],
               f"noise-started ablation: degree {ablation['degree']:.4f}, spectral {ablation['spectral']:.4f}"),
        report(abs(edges - expected) <= 0.3 * expected, f"edge count: sampled {edges:.1f}, training {expected:.1f}"),
    ]


def check_fidelity(model, train, test, seed):
    def one(i):
        rng = make_rng(seed, STREAMS["sampling"], i)
        lambdas = sample_eigenvalues(model.eigval_net, model.k, rng, model.epsilon)
        return SpectralData(model.k, lambdas, sample_eigenvectors(model.eigvec_net, model.n_max, lambdas, rng,
                                                                  model.epsilon))

    generated = [one(i) for i in range(NUM_SAMPLES)]
    reference = [graph_spectrum(g, model.k, model.n_max) for g in test]
    training = [graph_spectrum(g, model.k, model.n_max) for g in train]
    result = spectral_fidelity(generated, reference, training, make_rng(seed, STREAMS["evaluation"]))
    ok = (result.eigenvalue_ratio is not None and result.random_eigenvalue_ratio is not None
          and result.random_eigenvalue_ratio >= 2.0 * result.eigenvalue_ratio)
    return report(ok, f"eigenvalue ratio {result.eigenvalue_ratio}, random baseline {result.random_eigenvalue_ratio}")


def check_throughput(model, seed):
    _, timings = generate_graphs(lambda rng: sfmg_sample(model, rng), 10, seed)
    return report(sum(timings) < 5.0, f"10 samples in {sum(timings):.2f}s (limit 5s)")


def check_memorization(rc, graph, seed):
    model = train_model([graph] * 8, rc)
    target = graph.to_networkx()
    graphs, _ = generate_graphs(lambda rng: sfmg_sample(model, rng), 20, seed)
    hits = sum(nx.is_isomorphic(strip_isolated(g).to_networkx(), target) for g in graphs)
    return report(hits >= 12, f"single-graph memorization: {hits}/20 isomorphic samples")


def main():
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--seed", type=int, default=0)
    parser.add_argument("--steps", type=int, help="Override the desk step count of every stage")
    args = parser.parse_args()

    overrides = {"family": FAMILY, "seed": args.seed}
    if args.steps:
        overrides.update({f"{s}.steps": args.steps for s in ("eigenvalues", "eigenvectors", "postprocess", "noise-fm")})
    rc = load_run_config(overrides=overrides)
    entry = load_family_table()[FAMILY]

    print(f"Generating {entry['count']} {FAMILY} graphs...")
    graphs = generate(DatasetSpec(FAMILY, entry["count"], seed=args.seed, params=entry["params"]))
    train, test = split(graphs, rc.train_fraction, args.seed)

    print("Training the three stages...")
    model = train_model(train, rc)
    results = check_structure(model, rc, train, test, args.seed)
    results.append(check_fidelity(model, train, test, args.seed))
    results.append(check_throughput(model, args.seed))
    results.append(check_memorization(rc, train[0], args.seed))
    logger.info("Desk benchmark finished", passed=sum(results), total=len(results))
    return 0 if all(results) else 1


if __name__ == "__main__":
    sys.exit(main())
