"""
## Description:
Here, we test the uniform source-sampling approximators: the sample
itself, the extrapolation arithmetic on graphs small enough to check by
hand, the exact limit at fraction 1, and the per-trial seeding.
"""

# (X): Native Library | os:
import os

# (X): Native Library | unittest:
import unittest

# (X): Native Library | warnings:
import warnings

# (X): Native Library | mock:
from unittest import mock

# (X): External Library | NumPy:
import numpy as np

# (X): Self-Import | generator:
from centrank_lib.bter import generate_bter

# (X): Self-Import | exact centralities:
from centrank_lib.centrality import betweenness_closeness

# (X): Self-Import | graph helpers:
from centrank_lib.graph import Graph, erdos_renyi, largest_connected_component

# (X): Self-Import | records:
from centrank_lib.inputs import BterConfig, DegreeDistributionSpec, SampleConfig

# (X): Self-Import | tau-b:
from centrank_lib.ranking import kendall_tau_b

# (X): Self-Import | sampling:
from centrank_lib.sampling import approx_betweenness_closeness, sample_vertices, sampled_trials, trial_seed

# (X): Self-Import | exceptions:
from centrank_lib.validation import ConfigurationError

def _star(leaves: int) -> Graph:
    return Graph.from_edges(leaves + 1, [(0, leaf) for leaf in range(1, leaves + 1)])

class TestSampleConfig(unittest.TestCase):
    """
    ## Description:
    Sample sizes and the admissible fractions.
    """

    def test_sample_size(self):
        self.assertEqual(SampleConfig(fraction = 0.05).sample_size(1000), 50)
        self.assertEqual(SampleConfig(fraction = 0.001).sample_size(100), 1)
        self.assertEqual(SampleConfig(fraction = 1.).sample_size(7), 7)

    def test_sample_size_rounds_up(self):
        self.assertEqual(SampleConfig(fraction = 0.025).sample_size(100), 3)
        self.assertEqual(SampleConfig(fraction = 0.05).sample_size(30), 2)
        self.assertEqual(SampleConfig(fraction = 0.07).sample_size(100), 7)
        self.assertEqual(SampleConfig(fraction = 0.5).sample_size(3), 2)

    def test_fraction_bounds(self):
        with self.assertRaises(ConfigurationError):
            SampleConfig(fraction = 0.)

        with self.assertRaises(ConfigurationError):
            SampleConfig(fraction = 1.5)

    def test_trials_must_be_positive(self):
        with self.assertRaises(ConfigurationError):
            SampleConfig(fraction = 0.5, trials = 0)

class TestSampleVertices(unittest.TestCase):
    """
    ## Description:
    Distinct, sorted, reproducible.
    """

    @classmethod
    def setUpClass(cls):
        cls.graph = Graph.from_edges(1000, [(i, i + 1) for i in range(999)])

    def test_size_and_order(self):
        sources = sample_vertices(self.graph, SampleConfig(fraction = 0.05, seed = 4))

        self.assertEqual(sources.size, 50)
        self.assertEqual(np.unique(sources).size, 50)
        self.assertTrue(np.all(np.diff(sources) > 0))

    def test_same_seed_same_sample(self):
        config = SampleConfig(fraction = 0.05, seed = 9)

        np.testing.assert_array_equal(sample_vertices(self.graph, config), sample_vertices(self.graph, config))

    def test_trial_seeds_differ(self):
        seeds = {trial_seed(0, trial) for trial in range(5)}

        self.assertEqual(len(seeds), 5)
        self.assertEqual(trial_seed(3, 1), trial_seed(3, 1))

class TestEstimators(unittest.TestCase):
    """
    ## Description:
    The extrapolation on the star, where every estimate can be written down.
    """

    def test_hub_only_sample(self):
        graph = _star(4)

        with mock.patch("centrank_lib.sampling.sample_vertices", return_value = np.array([0])):
            betweenness, closeness = approx_betweenness_closeness(graph, SampleConfig(fraction = 0.2))

        # (X): The hub's own dependency is excluded, leaves carry none:
        np.testing.assert_allclose(betweenness.values, np.zeros(5))

        # (X): Leaf farness (n - 1) / 1 x 1 = 4; the hub keeps its own row sum 4:
        np.testing.assert_allclose(closeness.values, np.full(5, 0.25))
        self.assertEqual(closeness.provenance["sample_size"], 1)

    def test_leaf_only_sample(self):
        graph = _star(4)

        with mock.patch("centrank_lib.sampling.sample_vertices", return_value = np.array([1])):
            betweenness, closeness = approx_betweenness_closeness(graph, SampleConfig(fraction = 0.2))

        # (X): The leaf's tree routes 3 pairs through the hub, scaled by n / k = 5 and halved:
        np.testing.assert_allclose(betweenness.values, [7.5, 0., 0., 0., 0.])

        # (X): The hub is 1 hop away, other leaves 2, leaf 1 keeps its exact farness 7:
        np.testing.assert_allclose(closeness.values, [1. / 4., 1. / 7., 1. / 8., 1. / 8., 1. / 8.])

    def test_full_fraction_equals_exact(self):
        graph = largest_connected_component(erdos_renyi(70, 0.08, seed = 12))

        exact_betweenness, exact_closeness = betweenness_closeness(graph, workers = 1)
        betweenness, closeness = approx_betweenness_closeness(graph, SampleConfig(fraction = 1., seed = 77), workers = 1)

        np.testing.assert_allclose(betweenness.values, exact_betweenness.values, rtol = 1e-12, atol = 1e-12)
        np.testing.assert_allclose(closeness.values, exact_closeness.values, rtol = 1e-12)

    def test_disconnected_is_refused(self):
        graph = Graph.from_edges(4, [(0, 1), (2, 3)])

        with self.assertRaises(ValueError):
            approx_betweenness_closeness(graph, SampleConfig(fraction = 0.5))

class TestTrials(unittest.TestCase):
    """
    ## Description:
    Repeated trials are reproducible and independent.
    """

    @classmethod
    def setUpClass(cls):
        cls.graph = largest_connected_component(erdos_renyi(150, 0.04, seed = 1))

    def test_trial_count_and_provenance(self):
        results = sampled_trials(self.graph, SampleConfig(fraction = 0.1, seed = 5, trials = 3), workers = 1)

        self.assertEqual(len(results), 3)
        self.assertEqual([betweenness.provenance["trial"] for betweenness, _ in results], [0, 1, 2])
        self.assertEqual(results[1][1].provenance["seed"], trial_seed(5, 1))

    def test_reproducible(self):
        config = SampleConfig(fraction = 0.1, seed = 5, trials = 2)
        first = sampled_trials(self.graph, config, workers = 1)
        second = sampled_trials(self.graph, config, workers = 1)

        for (b1, c1), (b2, c2) in zip(first, second):
            np.testing.assert_array_equal(b1.values, b2.values)
            np.testing.assert_array_equal(c1.values, c2.values)

    def test_trials_use_different_sources(self):
        results = sampled_trials(self.graph, SampleConfig(fraction = 0.1, seed = 5, trials = 2), workers = 1)

        self.assertFalse(np.array_equal(results[0][0].values, results[1][0].values))

@unittest.skipUnless(os.environ.get("CENTRANK_RUN_SLOW") == "1", "set CENTRANK_RUN_SLOW=1 to run the acceptance runs")
class TestSamplingQuality(unittest.TestCase):
    """
    ## Description:
    Ten BTER networks of 2000 vertices, five trials per fraction: the 5%
    estimates rank vertices close to the exact order, and halving the
    sample does not improve them.
    """

    # (X): Networks, their size, and trials per fraction:
    NETWORKS = 10
    SIZE = 2000
    TRIALS = 5

    def test_tau_b_against_exact(self):
        means = {}

        for index in range(self.NETWORKS):
            config = BterConfig(
                n = self.SIZE,
                distribution = DegreeDistributionSpec("heavy_tailed", exponent = 2.),
                clustering_target = 0.5,
                seed = index)

            with warnings.catch_warnings():
                warnings.simplefilter("ignore")
                graph = largest_connected_component(generate_bter(config))

            exact = betweenness_closeness(graph)

            for fraction in (0.025, 0.05):
                for trial in sampled_trials(graph, SampleConfig(fraction = fraction, seed = index, trials = self.TRIALS)):
                    for metric, (estimate, reference) in enumerate(zip(trial, exact)):
                        means.setdefault((fraction, metric), []).append(kendall_tau_b(reference.values, estimate.values))

        for metric in (0, 1):
            self.assertGreaterEqual(np.mean(means[(0.05, metric)]), 0.85)
            self.assertGreaterEqual(np.mean(means[(0.05, metric)]), np.mean(means[(0.025, metric)]) - 0.02)

if __name__ == "__main__":
    unittest.main()
