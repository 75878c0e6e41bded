import json
import os
import tempfile
import unittest
import networkx as nx
import numpy as np

from src.datasets import generate
from src.eval import (
    IsomorphismIndex, benchmark_metrics, build_report, gram_matrix, is_planar_valid, is_sbm_valid, mmd,
    median_bandwidth, random_eigenvalues, ratio_to_baseline, report_table, report_to_json, rbf,
    spectral_fidelity, uniqueness_novelty, validity, wavelet_signature, write_report,
)
from src.eval.metrics import DEFAULT_KERNELS, METRICS
from src.graphs import graph_spectrum
from src.models import DatasetSpec, Graph, KernelSpec
from src.numerics import make_rng
from src.utils import RangeError, ShapeError

EMD = KernelSpec("earth-mover", sigma=1.0)


def relabel(g: Graph, seed: int) -> Graph:
    perm = np.random.default_rng(seed).permutation(g.n)
    return Graph(n=g.n, adjacency=g.adjacency[np.ix_(perm, perm)])


def grids():
    return [Graph.from_networkx(nx.grid_2d_graph(3 + i % 3, 4 + i % 2)) for i in range(10)]


def cliques():
    return [Graph.from_networkx(nx.complete_graph(5 + i)) for i in range(10)]


class TestMMD(unittest.TestCase):
    # ========== ESTIMATOR TESTS ==========
    def test_identical_sets(self):
        S = [make_rng(i).random(12) for i in range(6)]
        self.assertLessEqual(abs(mmd(S, S, EMD)), 1e-12)

    def test_singletons(self):
        x, y = np.array([0.2, 0.8]), np.array([0.6, 0.4])
        spec = KernelSpec("euclidean", sigma=0.5)
        self.assertAlmostEqual(mmd([x], [y], spec), 2.0 * (1.0 - rbf(x, y, spec)), places=12)

    def test_emd_on_unit_histograms(self):
        k = rbf(np.array([1.0, 0.0]), np.array([0.0, 1.0]), EMD)
        self.assertAlmostEqual(k, np.exp(-0.5), places=12)
        self.assertAlmostEqual(mmd([np.array([1.0, 0.0])], [np.array([0.0, 1.0])], EMD),
                               2.0 * (1.0 - np.exp(-0.5)), places=12)

    def test_total_variation_and_padding(self):
        spec = KernelSpec("total-variation", sigma=1.0)
        K = gram_matrix([np.array([1.0])], [np.array([0.0, 1.0])], spec)
        self.assertAlmostEqual(K[0, 0], np.exp(-0.5), places=12)

    def test_order_invariance(self):
        rng = make_rng(1)
        G = [rng.random(5) for _ in range(4)]
        R = [rng.random(5) for _ in range(3)]
        self.assertAlmostEqual(mmd(G, R, EMD), mmd(G[::-1], R[::-1], EMD), places=12)
        self.assertGreaterEqual(mmd(G, R, EMD), -1e-12)

    def test_empty_set(self):
        with self.assertRaises(RangeError):
            mmd([], [np.zeros(2)], EMD)

    def test_helpers(self):
        self.assertIsNone(ratio_to_baseline(0.5, 0.0))
        self.assertAlmostEqual(ratio_to_baseline(0.5, 0.25), 2.0)
        self.assertEqual(median_bandwidth([np.zeros(2), np.zeros(2)]), 1.0)
        self.assertAlmostEqual(median_bandwidth([np.zeros(1), np.ones(1), 3 * np.ones(1)]), 2.0)


class TestBenchmarkMetrics(unittest.TestCase):
    # ========== STRUCTURAL MMD TESTS ==========
    def test_identical_sets_score_zero(self):
        graphs = grids()
        result = benchmark_metrics(graphs, graphs, training=cliques())
        for m in METRICS:
            self.assertLessEqual(abs(result.mmds[m]), 1e-12)
        self.assertAlmostEqual(result.ratio, 0.0, places=12)

    def test_disjoint_families_separate(self):
        result = benchmark_metrics(grids(), cliques())
        for m in METRICS:
            self.assertGreater(result.mmds[m], 0.1, msg=m)
        self.assertIsNone(result.ratio)

    def test_training_against_itself_gives_ratio_one(self):
        graphs = generate(DatasetSpec("community-small", 12, seed=3))
        train, test = graphs[:9], graphs[9:]
        result = benchmark_metrics(train, test, training=train)
        self.assertAlmostEqual(result.ratio, 1.0, places=12)

    def test_relabelling_invariance(self):
        graphs = generate(DatasetSpec("ego-small", 6, seed=2))
        moved = [relabel(g, i) for i, g in enumerate(graphs)]
        a = benchmark_metrics(graphs, grids())
        b = benchmark_metrics(moved, grids())
        for m in METRICS:
            self.assertAlmostEqual(a.mmds[m], b.mmds[m], places=12)

    def test_empty_samples_are_penalized(self):
        cycles = [Graph.from_networkx(nx.cycle_graph(n)) for n in (5, 6, 7, 8)]
        good = benchmark_metrics(cycles[:2], cycles)
        padded = benchmark_metrics(cycles[:2] + [Graph.from_edges(0, [])] * 8, cycles)
        for m in METRICS:
            self.assertGreater(padded.mmds[m], good.mmds[m] + 1e-3, msg=m)
        self.assertEqual(good.empty_fraction, 0.0)
        self.assertAlmostEqual(padded.empty_fraction, 0.8)

    def test_empty_reference_is_rejected(self):
        with self.assertRaises(RangeError):
            benchmark_metrics(grids(), [Graph.from_edges(0, [])])
        with self.assertRaises(RangeError):
            benchmark_metrics([], grids())

    def test_default_kernels(self):
        self.assertEqual(DEFAULT_KERNELS["degree"].base, "total-variation")
        self.assertEqual(DEFAULT_KERNELS["clustering"].sigma, 0.1)
        self.assertEqual(DEFAULT_KERNELS["orbit"].sigma, 30.0)


class TestDiversity(unittest.TestCase):
    # ========== UNIQUENESS / NOVELTY TESTS ==========
    def test_identical_generated(self):
        g = Graph.from_networkx(nx.cycle_graph(6))
        scores = uniqueness_novelty([g] * 4, [])
        self.assertAlmostEqual(scores.uniqueness, 25.0)
        self.assertAlmostEqual(scores.novelty, 100.0)

    def test_permuted_training_copies_are_not_novel(self):
        training = generate(DatasetSpec("community-small", 5, seed=4))
        scores = uniqueness_novelty([relabel(g, i) for i, g in enumerate(training)], training)
        self.assertEqual(scores.novelty, 0.0)
        self.assertEqual(scores.unique_novel, 0.0)

    def test_all_new_and_distinct(self):
        generated = [Graph.from_networkx(nx.path_graph(n)) for n in range(3, 8)]
        scores = uniqueness_novelty(generated, [Graph.from_networkx(nx.cycle_graph(5))])
        self.assertEqual((scores.uniqueness, scores.novelty, scores.unique_novel), (100.0, 100.0, 100.0))

    def test_index_uses_exact_check(self):
        index = IsomorphismIndex()
        self.assertTrue(index.add(nx.cycle_graph(6)))
        self.assertFalse(index.add(nx.relabel_nodes(nx.cycle_graph(6), {i: (i * 5) % 6 for i in range(6)})))
        # same colour-refinement hash, different graphs
        two_triangles = nx.disjoint_union(nx.complete_graph(3), nx.complete_graph(3))
        self.assertTrue(index.add(two_triangles))


class TestValidity(unittest.TestCase):
    # ========== VALIDITY TESTS ==========
    def test_planar_family_is_valid(self):
        graphs = generate(DatasetSpec("planar", 5, seed=1))
        self.assertEqual(validity(graphs, "planar"), 100.0)

    def test_k5_with_tail_is_invalid(self):
        G = nx.complete_graph(5)
        nx.add_path(G, [4, 5, 6, 7])
        self.assertFalse(is_planar_valid(Graph.from_networkx(G)))

    def test_three_block_sbm_is_valid(self):
        probs = [[0.3, 0.005, 0.005], [0.005, 0.3, 0.005], [0.005, 0.005, 0.3]]
        for seed in range(20):
            G = nx.stochastic_block_model([25, 25, 25], probs, seed=seed)
            if nx.is_connected(G):
                break
        self.assertTrue(is_sbm_valid(Graph.from_networkx(G)))

    def test_sbm_family_mostly_valid(self):
        graphs = generate(DatasetSpec("sbm", 10, seed=0))
        self.assertGreaterEqual(validity(graphs, "sbm"), 90.0)
        self.assertLess(validity(grids(), "sbm"), 50.0)

    def test_unsupported_family(self):
        with self.assertRaises(RangeError):
            validity(grids(), "grid")


class TestFidelity(unittest.TestCase):
    # ========== SPECTRAL FIDELITY TESTS ==========
    def spectra(self, seed: int, count: int = 12, k: int = 2):
        return [graph_spectrum(g, k) for g in generate(DatasetSpec("community-small", count, seed=seed))]

    def test_wavelet_signature_blocks(self):
        sig = wavelet_signature(self.spectra(0, count=1)[0])
        self.assertEqual(sig.shape, (200,))
        np.testing.assert_allclose(sig.reshape(4, 50).sum(axis=1), np.ones(4))

    def test_random_eigenvalues(self):
        draws = random_eigenvalues(20, 3, make_rng(0))
        self.assertTrue(all(np.all(np.diff(d) >= 0) and d.min() >= 0 and d.max() <= 2 for d in draws))

    def test_matching_spectra_score_zero(self):
        reference = self.spectra(1)
        result = spectral_fidelity(reference, reference, self.spectra(2), make_rng(0))
        self.assertLessEqual(abs(result.eigenvalue_mmd), 1e-12)
        self.assertLessEqual(abs(result.eigenvector_mmd), 1e-12)

    def test_random_baseline_is_worse(self):
        result = spectral_fidelity(self.spectra(3), self.spectra(4), self.spectra(5), make_rng(0))
        self.assertGreater(result.random_eigenvalue_ratio, result.eigenvalue_ratio)

    def test_mismatched_k(self):
        with self.assertRaises(ShapeError):
            spectral_fidelity(self.spectra(1, count=3, k=3), self.spectra(2, count=3), self.spectra(3, count=3),
                              make_rng(0))


class TestReport(unittest.TestCase):
    # ========== REPORT TESTS ==========
    def test_report_is_deterministic(self):
        graphs = generate(DatasetSpec("planar", 4, seed=6))
        train, test = graphs[:3], graphs[3:]
        spectra = tuple([graph_spectrum(g, 2) for g in s] for s in (train, test, train))
        first = build_report(train, test, train, family="planar", spectra=spectra, rng=make_rng(1))
        second = build_report(train, test, train, family="planar", spectra=spectra, rng=make_rng(1))
        self.assertEqual(report_to_json(first), report_to_json(second))
        self.assertAlmostEqual(first.ratio, 1.0, places=12)
        self.assertEqual(first.validity, 100.0)
        self.assertEqual(first.novelty, 0.0)

    def test_write_report(self):
        report = build_report(grids(), cliques())
        with tempfile.TemporaryDirectory() as tmp:
            path = os.path.join(tmp, "report.json")
            json_path, table_path = write_report(path, report)
            payload = json.loads(open(json_path, encoding="utf-8").read())
            table = open(table_path, encoding="utf-8").read()
        self.assertEqual(payload["num_generated"], 10)
        self.assertIsNone(payload["ratio"])
        self.assertIn("Deg.", table)
        self.assertNotIn("Ratio", report_table(report))


if __name__ == "__main__":
    unittest.main()
