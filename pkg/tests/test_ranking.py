"""
## Description:
Here, we test the rank transform, the normalization chain, and the
evaluation statistics. Kendall tau-b is checked against an O(n^2) pair
enumeration and against `scipy.stats.kendalltau`.
"""

# (X): Native Library | io:
import io

# (X): Native Library | itertools:
import itertools

# (X): Native Library | math:
import math

# (X): Native Library | unittest:
import unittest

# (X): External Library | NumPy:
import numpy as np

# (X): External Library | SciPy:
from scipy import stats

# (X): Self-Import | rank machinery:
from centrank_lib.ranking import (
    EvalReport,
    confidence_interval,
    count_inversions,
    denormalize,
    fit_stats,
    kendall_tau_b,
    mean_squared_error,
    normalize_chain,
    r_squared,
    rank_transform,
    read_eval_reports,
    scale_ranks,
    standardize,
    unscale_ranks,
    write_eval_reports)

# (X): Self-Import | exceptions:
from centrank_lib.validation import DegenerateFeatureError

def _brute_force_tau_b(x, y) -> float:
    concordant = discordant = tied_x_only = tied_y_only = 0

    for i, j in itertools.combinations(range(len(x)), 2):
        dx = x[i] - x[j]
        dy = y[i] - y[j]

        if dx == 0 and dy == 0:
            continue

        if dx == 0:
            tied_x_only += 1

        elif dy == 0:
            tied_y_only += 1

        elif dx * dy > 0:
            concordant += 1

        else:
            discordant += 1

    return (concordant - discordant) / math.sqrt(
        (concordant + discordant + tied_x_only) * (concordant + discordant + tied_y_only))

class TestRankTransform(unittest.TestCase):
    """
    ## Description:
    Largest value first, ties averaged.
    """

    def test_ties_share_the_mean_position(self):
        np.testing.assert_array_equal(rank_transform([5, 3, 3, 1]).ranks, [1., 2.5, 2.5, 4.])

    def test_all_tied(self):
        np.testing.assert_array_equal(rank_transform([7, 7, 7]).ranks, [2., 2., 2.])

    def test_rank_sum(self):
        values = np.random.Generator(np.random.PCG64(3)).integers(0, 10, size = 50)
        ranks = rank_transform(values)

        self.assertEqual(ranks.n, 50)
        self.assertAlmostEqual(float(ranks.ranks.sum()), 50 * 51 / 2)

    def test_nan_is_refused(self):
        with self.assertRaises(ValueError):
            rank_transform([1., float("nan")])

    def test_infinity_is_refused(self):
        for bad in (float("inf"), -float("inf")):
            with self.assertRaises(ValueError):
                rank_transform([1., bad, 3.])

    def test_empty_is_refused(self):
        with self.assertRaises(ValueError):
            rank_transform([])

class TestNormalizationChain(unittest.TestCase):
    """
    ## Description:
    Scale into (-1, 1], standardize with training stats, and invert.
    """

    def test_scaling_end_points(self):
        np.testing.assert_allclose(scale_ranks(np.array([1., 100.]), 100), [-0.98, 1.])

    def test_scaling_round_trip(self):
        ranks = np.array([1., 2.5, 2.5, 4.])
        np.testing.assert_allclose(unscale_ranks(scale_ranks(ranks, 4), 4), ranks)

    def test_standardized_training_rows(self):
        features = np.array([[1., 10.], [2., 20.], [3., 30.], [4., 50.]])
        standardized, stats_ = standardize(features)

        np.testing.assert_allclose(standardized.mean(axis = 0), [0., 0.], atol = 1e-12)
        np.testing.assert_allclose(standardized.std(axis = 0), [1., 1.])
        np.testing.assert_allclose(stats_.mean, [2.5, 27.5])

    def test_given_stats_are_applied_unchanged(self):
        _, stats_ = standardize(np.array([[0.], [2.]]))
        applied, same_stats = standardize(np.array([[4.]]), stats_)

        self.assertIs(same_stats, stats_)
        np.testing.assert_allclose(applied, [[3.]])

    def test_degenerate_column(self):
        with self.assertRaises(DegenerateFeatureError):
            fit_stats(np.array([[1., 2.], [1., 3.]]))

    def test_chain_inverts_back_to_ranks(self):
        ranks = rank_transform([9., 4., 4., 1., 0.5])
        standardized, stats_ = normalize_chain(ranks, ranks.n)

        np.testing.assert_allclose(denormalize(standardized, stats_, n = ranks.n).ravel(), ranks.ranks)

    def test_stats_dictionary(self):
        stats_ = fit_stats(np.array([1., 3.]))
        restored = type(stats_).from_dict(stats_.to_dict())

        np.testing.assert_array_equal(restored.mean, [2.])
        np.testing.assert_array_equal(restored.std, [1.])

class TestKendallTauB(unittest.TestCase):
    """
    ## Description:
    The merge-sort tau-b against two independent computations.
    """

    # (X): Sizes of the random comparisons:
    SIZES = (2, 3, 10, 57, 200)

    def test_single_swap(self):
        self.assertAlmostEqual(kendall_tau_b([1, 2, 3, 4], [1, 3, 2, 4]), 2. / 3.)

    def test_identical_and_reversed(self):
        values = np.arange(20.)

        self.assertEqual(kendall_tau_b(values, values), 1.)
        self.assertEqual(kendall_tau_b(values, values[::-1]), -1.)

    def test_constant_side_is_undefined(self):
        with self.assertRaises(ValueError) as context:
            kendall_tau_b([1, 1, 1], [1, 2, 3])

        self.assertIn("tau undefined", str(context.exception))

    def test_length_mismatch(self):
        with self.assertRaises(ValueError):
            kendall_tau_b([1, 2], [1, 2, 3])

    def test_against_brute_force_with_ties(self):
        rng = np.random.Generator(np.random.PCG64(21))

        for size in self.SIZES:
            x = rng.integers(0, 5, size = size).astype(float)
            y = rng.integers(0, 5, size = size).astype(float)

            if len(set(x)) < 2 or len(set(y)) < 2:
                continue

            self.assertAlmostEqual(
                kendall_tau_b(x, y), _brute_force_tau_b(x.tolist(), y.tolist()), places = 12,
                msg = f"[ASSERT]: tau-b mismatch at size {size}")

    def test_against_scipy(self):
        rng = np.random.Generator(np.random.PCG64(8))

        for size in self.SIZES[2:]:
            x = rng.normal(size = size)
            y = x + rng.normal(size = size)
            y[::7] = 0.

            expected = stats.kendalltau(x, y)[0]
            self.assertAlmostEqual(kendall_tau_b(x, y), expected, places = 10)

    def test_inversion_count(self):
        self.assertEqual(count_inversions(np.array([3, 1, 2])), 2)
        self.assertEqual(count_inversions(np.array([1, 1, 1])), 0)
        self.assertEqual(count_inversions(np.array([5, 4, 3, 2, 1])), 10)

        rng = np.random.Generator(np.random.PCG64(2))
        values = rng.integers(-3, 9, size = 77)
        expected = sum(1 for i, j in itertools.combinations(range(values.size), 2) if values[i] > values[j])

        self.assertEqual(count_inversions(values), expected)

class TestErrorStatistics(unittest.TestCase):
    """
    ## Description:
    R^2, MSE, confidence intervals, and the report rows.
    """

    def test_r_squared_can_be_negative(self):
        self.assertAlmostEqual(r_squared([1., 2., 3.], [0., 1., 2.]), -0.5)

    def test_r_squared_perfect(self):
        self.assertEqual(r_squared([0., 1., 2.], [0., 1., 2.]), 1.)

    def test_r_squared_constant_target(self):
        with self.assertRaises(ValueError):
            r_squared([0., 1.], [1., 1.])

    def test_mean_squared_error(self):
        self.assertAlmostEqual(mean_squared_error([1., 2., 3.], [0., 2., 5.]), 5. / 3.)

    def test_confidence_interval(self):
        mean, half_width = confidence_interval([1., 2., 3., 4.])

        self.assertAlmostEqual(mean, 2.5)
        self.assertAlmostEqual(half_width, 2.576 * np.std([1., 2., 3., 4.], ddof = 1) / 2.)
        self.assertEqual(confidence_interval([0.7]), (0.7, 0.))

    def test_confidence_interval_skips_nan(self):
        mean, _ = confidence_interval([1., float("nan"), 3.])
        self.assertAlmostEqual(mean, 2.)

    def test_report_rows_round_trip(self):
        reports = [
            EvalReport("net", "exact", "betweenness", 1., 1., 0., 0.25),
            EvalReport("net", "sample-0.05", "closeness", 0.8, 0.6, 0.1, None),
        ]
        stream = io.StringIO()
        write_eval_reports(reports, stream)

        self.assertTrue(stream.getvalue().startswith("network,method,metric,tau_b,r2,mse,seconds\n"))

        stream.seek(0)
        self.assertEqual(read_eval_reports(stream), reports)

    def test_report_refuses_bad_tau(self):
        with self.assertRaises(ValueError):
            EvalReport("net", "exact", "betweenness", 1.5, 1., 0.)

if __name__ == "__main__":
    unittest.main()
