import os
import tempfile
import unittest
from pathlib import Path
from unittest.mock import patch
import numpy as np

from src.datasets import (
    BaseGraphGenerator, DatasetFactory, RejectedSample, generate, load, load_split, read_metadata, save,
    save_dataset_dir, split, split_indices,
)
from src.graphs import graph_statistics, is_connected, is_planar
from src.models import DatasetSpec, Graph
from src.utils import ConfigError, DatasetError, GraphFormatError


class NeverGenerator(BaseGraphGenerator):
    family = "never"

    def sample(self, rng):
        raise RejectedSample("always")


class TestGenerators(unittest.TestCase):
    # ========== FAMILY TESTS ==========
    def test_community_small(self):
        graphs = generate(DatasetSpec("community-small", 20, seed=1))
        self.assertEqual(len(graphs), 20)
        for g in graphs:
            self.assertTrue(12 <= g.n <= 20)
            self.assertEqual(g.n % 2, 0)
            self.assertTrue(is_connected(g))

    def test_ego_small(self):
        for g in generate(DatasetSpec("ego-small", 20, seed=2)):
            self.assertTrue(4 <= g.n <= 18)
            self.assertTrue(is_connected(g))

    def test_planar(self):
        for g in generate(DatasetSpec("planar", 5, seed=3)):
            self.assertEqual(g.n, 64)
            self.assertTrue(is_planar(g))
            self.assertTrue(is_connected(g))

    def test_sbm(self):
        for g in generate(DatasetSpec("sbm", 4, seed=4)):
            self.assertTrue(44 <= g.n <= 192)
            self.assertTrue(is_connected(g))

    def test_grid(self):
        for g in generate(DatasetSpec("grid", 5, seed=5)):
            self.assertTrue(100 <= g.n <= 400)
            degrees = set(g.adjacency.sum(axis=1).tolist())
            self.assertTrue(degrees <= {2, 3, 4})
            stats = graph_statistics(g)
            self.assertEqual(stats.clustering_histogram[0], g.n)

    # ========== DETERMINISM TESTS ==========
    def test_same_seed_same_graphs(self):
        spec = DatasetSpec("community-small", 10, seed=7)
        first, second = generate(spec), generate(spec)
        parallel = generate(spec, jobs=3)
        for a, b, c in zip(first, second, parallel):
            np.testing.assert_array_equal(a.adjacency, b.adjacency)
            np.testing.assert_array_equal(a.adjacency, c.adjacency)

    def test_different_seeds_differ(self):
        a = generate(DatasetSpec("community-small", 5, seed=1))
        b = generate(DatasetSpec("community-small", 5, seed=2))
        self.assertTrue(any(x.n != y.n or not np.array_equal(x.adjacency, y.adjacency) for x, y in zip(a, b)))

    # ========== ERROR TESTS ==========
    def test_unknown_family(self):
        with self.assertRaises(DatasetError):
            generate(DatasetSpec("enzymes", 3))
        self.assertIn("grid", DatasetFactory.families())

    def test_unknown_parameter(self):
        with self.assertRaises(ConfigError):
            DatasetFactory.create("grid", {"width": 3})

    def test_rejection_cap_is_an_error(self):
        with patch.dict(DatasetFactory._mapping, {"never": NeverGenerator}):
            with self.assertRaises(DatasetError) as ctx:
                generate(DatasetSpec("never", 1))
        self.assertIn("1000", str(ctx.exception))


class TestSplits(unittest.TestCase):
    # ========== SPLIT TESTS ==========
    def test_eighty_twenty(self):
        train, test = split_indices(100, 0.8, seed=0)
        self.assertEqual((len(train), len(test)), (80, 20))
        self.assertEqual(sorted(train + test), list(range(100)))

    def test_small_dataset_keeps_one_test_graph(self):
        train, test = split_indices(5, 0.8, seed=0)
        self.assertEqual((len(train), len(test)), (4, 1))
        train, test = split_indices(2, 0.99, seed=0)
        self.assertEqual((len(train), len(test)), (1, 1))

    def test_split_is_deterministic(self):
        self.assertEqual(split_indices(30, seed=4), split_indices(30, seed=4))
        graphs = [Graph.from_edges(i + 1, []) for i in range(10)]
        train, test = split(graphs, seed=4)
        self.assertEqual(sorted(g.n for g in train + test), list(range(1, 11)))

    def test_empty_dataset(self):
        with self.assertRaises(DatasetError):
            split([], 0.8, 0)


class TestDatasetFiles(unittest.TestCase):
    # ========== FILE TESTS ==========
    def test_save_then_load(self):
        graphs = generate(DatasetSpec("community-small", 4, seed=9))
        with tempfile.TemporaryDirectory() as tmp:
            path = os.path.join(tmp, "d.jsonl")
            save(path, graphs)
            loaded = load(path)
        for a, b in zip(graphs, loaded):
            np.testing.assert_array_equal(a.adjacency, b.adjacency)

    def test_empty_file(self):
        with tempfile.TemporaryDirectory() as tmp:
            path = Path(tmp) / "empty.jsonl"
            path.write_text("", encoding="utf-8")
            self.assertEqual(load(path), [])

    def test_out_of_range_edge(self):
        with tempfile.TemporaryDirectory() as tmp:
            path = Path(tmp) / "bad.jsonl"
            path.write_text('{"n": 2, "edges": [[0, 1]]}\n{"n": 2, "edges": [[0, 2]]}\n', encoding="utf-8")
            with self.assertRaises(GraphFormatError) as ctx:
                load(path)
        self.assertEqual(ctx.exception.line, 2)

    def test_dataset_directory(self):
        spec = DatasetSpec("grid", 5, seed=1)
        graphs = generate(spec)
        train_idx, test_idx = split_indices(len(graphs), 0.8, spec.seed)
        with tempfile.TemporaryDirectory() as tmp:
            save_dataset_dir(tmp, spec, graphs, train_idx, test_idx)
            meta = read_metadata(tmp)
            train, test = load_split(tmp)
            self.assertEqual(read_metadata(Path(tmp) / "missing"), {})
            with self.assertRaises(DatasetError):
                load_split(Path(tmp) / "missing")
        self.assertEqual(meta["family"], "grid")
        self.assertEqual(meta["n_max"], max(g.n for g in graphs))
        self.assertEqual(meta["test_indices"], test_idx)
        self.assertEqual((len(train), len(test)), (4, 1))


if __name__ == "__main__":
    unittest.main()
