"""
## Description:
Here, we test the BTER generator and the training corpus: the realized
degree sequence, the three generation phases on cases whose outcome is
forced, the bookkeeping between phases, reproducibility, the corpus files
and manifest, and how closely twenty seeds at n = 1000 follow their targets.

## Notes:
1. Under the calibrated block rule a heavy-tailed network with exponent 2
cannot exceed a global clustering of about 0.48 at n = 1000 (its hubs only
share one block of about 20 vertices), so targets 0.5 and 0.7 both saturate
the block probability at 1.
"""

# (X): Native Library | json:
import json

# (X): Native Library | tempfile:
import tempfile

# (X): Native Library | unittest:
import unittest

# (X): Native Library | warnings:
import warnings

# (X): Native Library | pathlib:
from pathlib import Path

# (X): External Library | NumPy:
import numpy as np

# (X): Self-Import | BTER:
from centrank_lib.bter import (
    MANIFEST_FILE_NAME,
    affinity_blocks,
    build_training_corpus,
    calibrated_block_probability,
    corpus_configs,
    generate_bter,
    generate_bter_with_diagnostics,
    network_seeds,
    read_manifest,
    realize_degree_sequence)

# (X): Self-Import | configuration records:
from centrank_lib.inputs import BterConfig, CorpusSpec, DegreeDistributionSpec

# (X): Self-Import | tau-b:
from centrank_lib.ranking import kendall_tau_b

# (X): Self-Import | exceptions:
from centrank_lib.validation import ConfigurationError

def _heavy(exponent: float, k_min: int = 1, k_max = None) -> DegreeDistributionSpec:
    return DegreeDistributionSpec("heavy_tailed", exponent = exponent, k_min = k_min, k_max = k_max)

def _quiet_generate(config: BterConfig):
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        return generate_bter_with_diagnostics(config)

class TestDegreeSequence(unittest.TestCase):
    """
    ## Description:
    Largest-remainder counts and the parity fix.
    """

    def test_heavy_tailed_small(self):
        sequence = realize_degree_sequence(10, _heavy(2.))

        self.assertEqual(sequence.counts, {1: 7, 2: 2, 3: 1})
        self.assertEqual(sequence.n, 10)
        self.assertEqual(sequence.degrees.tolist(), [1] * 7 + [2, 2, 3])

    def test_counts_sum_to_n(self):
        for n in (50, 137, 500):
            for spec in (_heavy(1.5), DegreeDistributionSpec("lognormal", shape = 10.)):
                sequence = realize_degree_sequence(n, spec)

                self.assertEqual(sum(sequence.counts.values()), n)
                self.assertEqual(sequence.total_degree % 2, 0)
                self.assertLessEqual(int(sequence.degrees.max()), n - 1)

    def test_parity_moves_the_populous_class_up(self):
        sequence = realize_degree_sequence(3, _heavy(2., k_min = 1, k_max = 1))

        self.assertEqual(sequence.counts, {1: 2, 2: 1})
        self.assertEqual(sequence.total_degree, 4)

    def test_k_max_above_n_is_refused(self):
        with self.assertRaises(ConfigurationError):
            realize_degree_sequence(5, _heavy(2., k_max = 5))

    def test_family_parameters(self):
        with self.assertRaises(ConfigurationError):
            DegreeDistributionSpec("heavy_tailed", shape = 2.)

        with self.assertRaises(ConfigurationError):
            DegreeDistributionSpec("triangular", exponent = 2.)

        self.assertEqual(DegreeDistributionSpec("lognormal", shape = 5.).label(), "lognormal-5")

class TestAffinityBlocks(unittest.TestCase):
    """
    ## Description:
    Blocks opened at a vertex of degree d hold the next d + 1 vertices, and
    the calibrated probability solved from them.
    """

    def test_packing(self):
        degrees = np.array([1, 1, 2, 2, 2, 2, 3, 3])
        blocks = affinity_blocks(degrees)

        self.assertEqual([block.tolist() for block in blocks], [[2, 3, 4], [5, 6, 7]])

    def test_blocks_cross_degree_classes(self):
        degrees = np.array([2, 2, 3, 3, 3, 3, 4, 4, 5])
        blocks = affinity_blocks(degrees)

        self.assertEqual([block.tolist() for block in blocks], [[0, 1, 2], [3, 4, 5, 6], [7, 8]])

    def test_degree_one_has_no_block(self):
        self.assertEqual(affinity_blocks(np.ones(5, dtype = int)), [])

    def test_partition_and_block_size(self):
        target = realize_degree_sequence(1000, _heavy(2.)).degrees
        blocks = affinity_blocks(target)
        members = np.concatenate(blocks)

        # (1): Every vertex of degree >= 2 sits in exactly one block:
        self.assertEqual(sorted(members.tolist()), np.flatnonzero(target >= 2).tolist())

        # (2): No block is larger than its smallest degree + 1:
        for block in blocks:
            self.assertLessEqual(block.size, int(target[block].min()) + 1)

    def test_calibrated_probability(self):
        degrees = np.full(4, 3)
        blocks = affinity_blocks(degrees)

        self.assertEqual(calibrated_block_probability(degrees, blocks, 1.), 1.)
        self.assertAlmostEqual(calibrated_block_probability(degrees, blocks, 0.125), 0.5)

        # (X): Degree-1 only: no block, the target is passed through:
        self.assertEqual(calibrated_block_probability(np.ones(4), [], 0.3), 0.3)

    def test_calibrated_probability_is_clipped(self):
        target = realize_degree_sequence(1000, _heavy(2.)).degrees
        blocks = affinity_blocks(target)

        low = calibrated_block_probability(target, blocks, 0.3)

        self.assertGreater(low, 0.8)
        self.assertLess(low, 0.9)
        self.assertEqual(calibrated_block_probability(target, blocks, 0.7), 1.)

class TestGenerator(unittest.TestCase):
    """
    ## Description:
    Forced outcomes, phase bookkeeping, and reproducibility.
    """

    def test_complete_block_is_k4(self):
        config = BterConfig(n = 4, distribution = _heavy(2., k_min = 3, k_max = 3), clustering_target = 1.)
        graph = generate_bter(config)

        self.assertEqual(graph.n, 4)
        self.assertEqual(graph.m, 6)

    def test_degree_one_goes_to_phase_three(self):
        config = BterConfig(n = 4, distribution = _heavy(2., k_min = 1, k_max = 1), clustering_target = 0.5, seed = 3)
        graph, diagnostics = _quiet_generate(config)

        self.assertEqual(diagnostics.block_count, 0)
        self.assertEqual(diagnostics.phase2_edges, 0)
        self.assertEqual(diagnostics.phase3_requested, 2)
        self.assertEqual(graph.m, diagnostics.phase3_placed)

        # (X): Four degree-1 stubs always close into a perfect matching:
        self.assertEqual(diagnostics.phase3_placed, 2)
        self.assertEqual(graph.degrees.tolist(), [1, 1, 1, 1])

    def test_phase_bookkeeping(self):
        for seed in range(3):
            config = BterConfig(n = 300, distribution = _heavy(2.), clustering_target = 0.5, seed = seed)
            graph, diagnostics = _quiet_generate(config)

            self.assertEqual(graph.n, 300)
            self.assertEqual(diagnostics.realized_m, diagnostics.phase2_edges + diagnostics.phase3_placed)
            self.assertEqual(
                diagnostics.phase3_requested,
                (diagnostics.target_degree_sum - 2 * diagnostics.phase2_edges + 1) // 2)
            self.assertEqual(diagnostics.unplaced_edges, diagnostics.phase3_requested - diagnostics.phase3_placed)

    def test_excess_is_placed_exactly(self):
        for seed in range(3):
            config = BterConfig(n = 500, distribution = _heavy(2.), clustering_target = 0.4, seed = seed)
            graph, diagnostics = _quiet_generate(config)
            target = realize_degree_sequence(500, config.distribution).degrees

            # (X): At most one pair of stubs can be left without an admissible partner:
            self.assertLessEqual(diagnostics.unplaced_edges, 1)
            self.assertLessEqual(int(np.abs(graph.degrees - target).sum()), 2)
            self.assertLessEqual(graph.m, diagnostics.target_degree_sum // 2)
            self.assertGreaterEqual(graph.m, diagnostics.target_degree_sum // 2 - 1)

    def test_same_seed_same_network(self):
        config = BterConfig(n = 200, distribution = DegreeDistributionSpec("lognormal", shape = 10.), clustering_target = 0.4, seed = 17)
        first, _ = _quiet_generate(config)
        second, _ = _quiet_generate(config)

        np.testing.assert_array_equal(first.offsets, second.offsets)
        np.testing.assert_array_equal(first.neighbors, second.neighbors)

    def test_clustering_grows_with_the_target(self):
        low = BterConfig(n = 300, distribution = _heavy(2.5), clustering_target = 0.1, seed = 2)
        high = BterConfig(n = 300, distribution = _heavy(2.5), clustering_target = 0.9, seed = 2)

        self.assertLess(_quiet_generate(low)[1].realized_clustering, _quiet_generate(high)[1].realized_clustering)

    def test_diagnostics_carry_the_block_probability(self):
        complete = BterConfig(n = 4, distribution = _heavy(2., k_min = 3, k_max = 3), clustering_target = 1.)
        uniform = BterConfig(n = 300, distribution = _heavy(2.), clustering_target = 0.3, block_rule = "uniform")

        self.assertEqual(_quiet_generate(complete)[1].block_probability, 1.)
        self.assertEqual(_quiet_generate(uniform)[1].block_probability, 0.3)

    def test_high_targets_end_up_with_high_degree(self):
        config = BterConfig(n = 500, distribution = _heavy(2.), clustering_target = 0.5, seed = 8)
        graph, _ = _quiet_generate(config)
        target = realize_degree_sequence(500, config.distribution).degrees

        self.assertGreater(graph.degrees[target >= 5].mean(), graph.degrees[target == 1].mean())

    def test_block_rules(self):
        calibrated = BterConfig(n = 10, distribution = _heavy(2.), clustering_target = 0.125)
        uniform = BterConfig(n = 10, distribution = _heavy(2.), clustering_target = 0.125, block_rule = "uniform")
        cube_root = BterConfig(n = 10, distribution = _heavy(2.), clustering_target = 0.125, block_rule = "cube_root")

        self.assertEqual(calibrated.block_rule, "calibrated")
        self.assertIsNone(calibrated.block_probability)
        self.assertAlmostEqual(uniform.block_probability, 0.125)
        self.assertAlmostEqual(cube_root.block_probability, 0.5)

        with self.assertRaises(ConfigurationError):
            BterConfig(n = 10, distribution = _heavy(2.), clustering_target = 0.5, block_rule = "flat")

    def test_configuration_checks(self):
        with self.assertRaises(ConfigurationError):
            BterConfig(n = 1, distribution = _heavy(2.), clustering_target = 0.5)

        with self.assertRaises(ConfigurationError):
            BterConfig(n = 10, distribution = _heavy(2.), clustering_target = 1.5)

        with self.assertRaises(ConfigurationError):
            BterConfig(n = 10, distribution = _heavy(2., k_min = 12), clustering_target = 0.5)

class TestCorpus(unittest.TestCase):
    """
    ## Description:
    A small corpus: layout, seeding, and byte-identical reruns.
    """

    # (X): Two families, two sizes, two replicates:
    SPEC = CorpusSpec(
        distributions = (DegreeDistributionSpec("heavy_tailed", exponent = 2.), DegreeDistributionSpec("lognormal", shape = 5.)),
        sizes = (30, 40),
        networks_per_size = 2,
        master_seed = 11)

    def _build(self, directory, workers = 1):
        with warnings.catch_warnings():
            warnings.simplefilter("ignore")
            return build_training_corpus(directory, self.SPEC, workers = workers)

    def test_spec_counts(self):
        self.assertEqual(self.SPEC.network_count, 8)
        self.assertEqual(self.SPEC.vertex_count, 2 * 70 * 2)
        self.assertEqual(CorpusSpec.full().network_count, 600)
        self.assertEqual(CorpusSpec.full().vertex_count, 330000)
        self.assertEqual(CorpusSpec.desk().network_count, 120)

    def test_configs_follow_the_corpus_spec(self):
        configs = corpus_configs(self.SPEC)

        self.assertEqual(len(configs), 8)
        self.assertEqual([config.n for config in configs], [30, 30, 40, 40, 30, 30, 40, 40])
        self.assertEqual(len({config.seed for config in configs}), 8)
        self.assertTrue(all(0.3 <= config.clustering_target <= 0.7 for config in configs))
        self.assertTrue(all(config.block_rule == "calibrated" for config in configs))
        self.assertEqual(configs[5].seed, network_seeds(11, 5)[0])

    def test_files_and_manifest(self):
        with tempfile.TemporaryDirectory() as directory:
            entries = self._build(directory)

            self.assertEqual(len(entries), 8)
            self.assertTrue((Path(directory) / MANIFEST_FILE_NAME).exists())

            for entry in entries:
                self.assertTrue(entry.edge_list.exists())

                with open(entry.metadata, "r", encoding = "utf-8") as stream:
                    metadata = json.load(stream)

                self.assertEqual(metadata["n"], entry.n)
                self.assertEqual(metadata["seed"], entry.seed)
                self.assertEqual(metadata["block_rule"], "calibrated")
                self.assertTrue(0. <= metadata["block_probability"] <= 1.)
                self.assertEqual(entry.load().m, entry.realized_m)

            self.assertEqual(read_manifest(directory), entries)

    def test_reruns_are_byte_identical(self):
        with tempfile.TemporaryDirectory() as first, tempfile.TemporaryDirectory() as second:
            self._build(first, workers = 1)
            self._build(second, workers = 2)

            first_files = sorted(path.name for path in Path(first).iterdir())
            second_files = sorted(path.name for path in Path(second).iterdir())

            self.assertEqual(first_files, second_files)

            for name in first_files:
                self.assertEqual(
                    (Path(first) / name).read_bytes(), (Path(second) / name).read_bytes(),
                    msg = f"[ASSERT]: {name} differs between reruns")

class TestFidelity(unittest.TestCase):
    """
    ## Description:
    Twenty seeds at n = 1000, heavy-tailed exponent 2, per clustering
    target: exact vertex counts, realized degrees ordered like the targets,
    mean clustering within 0.15 of 0.5 at target 0.5, and mean clustering
    ordered like the targets.
    """

    # (X): Seeds per target, and the targets:
    SEEDS = 20
    TARGETS = (0.3, 0.5, 0.7)

    # (X): Allowed distance of the mean clustering from the 0.5 target:
    BAND = 0.15

    @classmethod
    def setUpClass(cls):
        cls.distribution = _heavy(2.)
        cls.target_degrees = realize_degree_sequence(1000, cls.distribution).degrees
        cls.mean_clustering = {}
        cls.mean_tau = {}
        cls.vertex_counts = set()

        for clustering_target in cls.TARGETS:
            clustering, taus = [], []

            for seed in range(cls.SEEDS):
                graph, diagnostics = _quiet_generate(BterConfig(
                    n = 1000, distribution = cls.distribution, clustering_target = clustering_target, seed = seed))

                cls.vertex_counts.add(graph.n)
                clustering.append(diagnostics.realized_clustering)
                taus.append(kendall_tau_b(cls.target_degrees, graph.degrees))

            cls.mean_clustering[clustering_target] = float(np.mean(clustering))
            cls.mean_tau[clustering_target] = float(np.mean(taus))

    def test_degrees_follow_the_targets(self):
        self.assertEqual(self.vertex_counts, {1000})

        for clustering_target, tau in self.mean_tau.items():
            self.assertGreaterEqual(tau, 0.9, msg = f"[ASSERT]: mean tau-b {tau} at target {clustering_target}")

    def test_clustering_band(self):
        realized = self.mean_clustering[0.5]

        self.assertLessEqual(abs(realized - 0.5), self.BAND, msg = f"[ASSERT]: mean clustering {realized} at target 0.5")

    def test_clustering_is_monotone(self):
        means = [self.mean_clustering[clustering_target] for clustering_target in self.TARGETS]

        self.assertEqual(means, sorted(means))
        self.assertLess(means[0], means[1])

if __name__ == "__main__":
    unittest.main()
