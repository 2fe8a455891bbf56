"""
## Description:
Here, we test the trainers: the early-stopping book-keeping, the
Levenberg-Marquardt damping schedule, the first-order update rules, the
full training loop, cross-validation, and the architecture sweep.

## Notes:
1. The datasets here are synthetic rows with a smooth target, small enough
that every test trains in well under a second.
"""

# (X): Native Library | io:
import io

# (X): Native Library | unittest:
import unittest

# (X): External Library | NumPy:
import numpy as np

# (X): Self-Import | the dataset:
from centrank_lib.dataset import Dataset

# (X): Self-Import | the network:
from centrank_lib.network import MlpModel, gradient, init_model

# (X): Self-Import | trainers:
from centrank_lib.training import (
    FirstOrderState,
    TrainState,
    cross_validate,
    default_layouts,
    first_order_epoch,
    lm_epoch,
    sweep_architectures,
    train,
    write_history)

# (X): Self-Import | trainer records:
from centrank_lib.training_inputs import FirstOrderConfig, LmConfig, TrainingConfig

# (X): Self-Import | exceptions:
from centrank_lib.validation import ConfigurationError

def _synthetic_dataset(rows: int = 80, seed: int = 0) -> Dataset:
    """
    Rows whose label is a smooth function of the two inputs; every fourth row validates.
    """
    rng = np.random.Generator(np.random.PCG64(seed))
    inputs = rng.uniform(-1., 1., size = (rows, 2))
    labels = np.tanh(0.8 * inputs[:, 0] + 0.3 * inputs[:, 1]) + 0.01 * rng.normal(size = rows)
    is_training = np.arange(rows) % 4 != 0

    return Dataset.from_rows(
        network = np.array(["synthetic"] * rows, dtype = object),
        vertex = np.arange(rows),
        inputs = inputs,
        labels = labels,
        is_training = is_training,
        target_metric = "betweenness",
        seed = seed,
        manifest_sha256 = "0" * 64)

class TestTrainState(unittest.TestCase):
    """
    ## Description:
    Snapshot and patience.
    """

    def test_patience_stops_ten_epochs_after_the_best(self):
        state = TrainState(patience = 10)
        validation_curve = [1.0, 0.8, 0.5] + [0.6] * 20
        stopped_at = None

        for epoch, value in enumerate(validation_curve, start = 1):
            if state.record(value, value, np.array([float(epoch)])):
                stopped_at = epoch
                break

        self.assertEqual(stopped_at, 13)
        self.assertEqual(state.best_epoch, 3)
        self.assertEqual(state.best_val_mse, 0.5)
        np.testing.assert_array_equal(state.best_parameters, [3.])
        self.assertEqual(state.stopped_reason, "early_stopping")

    def test_snapshot_is_a_copy(self):
        state = TrainState(patience = 5)
        parameters = np.array([1., 2.])
        state.record(1., 1., parameters)
        parameters[0] = 99.

        np.testing.assert_array_equal(state.best_parameters, [1., 2.])

class TestLevenbergMarquardt(unittest.TestCase):
    """
    ## Description:
    The damping schedule on a linear least-squares problem.
    """

    @classmethod
    def setUpClass(cls):
        rng = np.random.Generator(np.random.PCG64(6))

        # (X): Integer inputs keep the exact fit's residuals exactly zero:
        cls.inputs = rng.integers(-3, 4, size = (20, 2)).astype(float)
        cls.weights = np.array([[1., 2.]])
        cls.bias = np.array([0.5])
        cls.targets = cls.inputs @ cls.weights[0] + cls.bias[0]

    def _linear(self, weights, bias) -> MlpModel:
        return MlpModel(layer_sizes = (2, 1), weights = [np.array(weights, dtype = float)], biases = [np.array(bias, dtype = float)])

    def test_accepted_step_shrinks_mu(self):
        config = LmConfig()
        state = TrainState(patience = 10, mu = config.mu0)
        model, state = lm_epoch(self._linear([[0., 0.]], [0.]), self.inputs, self.targets, state, config)

        self.assertAlmostEqual(state.mu, config.mu0 * 0.15)
        self.assertFalse(state.terminated)
        self.assertTrue(np.any(model.pack() != 0.))

    def test_converges_to_the_least_squares_solution(self):
        config = LmConfig()
        state = TrainState(patience = 10, mu = config.mu0)
        model = self._linear([[0., 0.]], [0.])

        for _ in range(30):
            model, state = lm_epoch(model, self.inputs, self.targets, state, config)

            if state.terminated:
                break

        np.testing.assert_allclose(model.pack(), [1., 2., 0.5], atol = 1e-8)

    def test_mu_ceiling_terminates(self):
        config = LmConfig(mu0 = 1., mu_max = 2.)
        state = TrainState(patience = 10, mu = config.mu0)
        exact = self._linear(self.weights, self.bias)

        model, state = lm_epoch(exact, self.inputs, self.targets, state, config)

        self.assertTrue(state.terminated)
        self.assertEqual(state.stopped_reason, "mu_max")
        self.assertIs(model, exact)
        self.assertAlmostEqual(state.mu, 2.25)

    def test_schedule_validation(self):
        self.assertAlmostEqual(LmConfig().mu_decrease, 0.15)

        with self.assertRaises(ConfigurationError):
            LmConfig(mu_increase = 0.9)

        with self.assertRaises(ConfigurationError):
            LmConfig(mu0 = 1e11)

class TestFirstOrder(unittest.TestCase):
    """
    ## Description:
    One step of each first-order rule.
    """

    @classmethod
    def setUpClass(cls):
        dataset = _synthetic_dataset()
        cls.inputs, cls.targets, _, _ = dataset.split()
        cls.model = init_model((2, 4, 1), seed = 1)

    def test_gradient_descent_step(self):
        config = FirstOrderConfig(algorithm = "gd", learning_rate = 0.1)
        updated, _ = first_order_epoch(self.model, self.inputs, self.targets, FirstOrderState(), config)

        expected = self.model.pack() - 0.1 * gradient(self.model, self.inputs, self.targets)
        np.testing.assert_allclose(updated.pack(), expected)

    def test_momentum_first_step(self):
        config = FirstOrderConfig(algorithm = "gdm", learning_rate = 0.1, momentum = 0.9)
        updated, memory = first_order_epoch(self.model, self.inputs, self.targets, FirstOrderState(), config)

        expected_step = -0.1 * (1. - 0.9) * gradient(self.model, self.inputs, self.targets)
        np.testing.assert_allclose(updated.pack() - self.model.pack(), expected_step, atol = 1e-15)
        np.testing.assert_allclose(memory.previous_step, expected_step)

    def test_rprop_steps_stay_bounded(self):
        config = FirstOrderConfig(algorithm = "rprop", rprop_max_step = 0.1)
        memory = FirstOrderState()
        model = self.model

        for _ in range(40):
            model, memory = first_order_epoch(model, self.inputs, self.targets, memory, config)

        self.assertLessEqual(float(memory.step_sizes.max()), 0.1)
        self.assertGreaterEqual(float(memory.step_sizes.min()), 1e-12)

    def test_rprop_first_step_uses_the_initial_size(self):
        config = FirstOrderConfig(algorithm = "rprop")
        updated, _ = first_order_epoch(self.model, self.inputs, self.targets, FirstOrderState(), config)
        grad = gradient(self.model, self.inputs, self.targets)

        np.testing.assert_allclose(updated.pack() - self.model.pack(), -np.sign(grad) * 0.07, atol = 1e-15)

class TestTrainingLoop(unittest.TestCase):
    """
    ## Description:
    The full loop: snapshot, stopping rules, provenance, reproducibility.
    """

    @classmethod
    def setUpClass(cls):
        cls.dataset = _synthetic_dataset()
        cls.config = TrainingConfig(hidden_layers = (4,), max_epochs = 25, seed = 3)

    def test_lm_fits_the_smooth_target(self):
        model, state = train(self.dataset, self.config)

        self.assertLess(state.best_val_mse, 0.05)
        self.assertGreater(model.training_provenance["validation_r2"], 0.9)
        self.assertLessEqual(state.best_epoch, state.epoch)
        self.assertIn(state.stopped_reason, ("early_stopping", "max_epochs", "mu_max"))

    def test_provenance_and_stats(self):
        model, state = train(self.dataset, self.config)
        provenance = model.training_provenance

        self.assertEqual(provenance["algorithm"], "lm")
        self.assertEqual(provenance["seeds"], {"initialization": 3, "dataset_split": 0})
        self.assertEqual(provenance["manifest_sha256"], "0" * 64)
        self.assertEqual(provenance["epochs"], state.epoch)
        self.assertEqual(model.target_metric, "betweenness")
        np.testing.assert_array_equal(model.output_stats.mean, self.dataset.output_stats.mean)

    def test_returns_the_best_snapshot(self):
        model, state = train(self.dataset, self.config)

        np.testing.assert_array_equal(model.pack(), state.best_parameters)

    def test_same_seed_same_model(self):
        first, _ = train(self.dataset, self.config)
        second, _ = train(self.dataset, self.config)

        np.testing.assert_array_equal(first.pack(), second.pack())

    def test_epoch_cap(self):
        config = TrainingConfig(hidden_layers = (3,), algorithm = "gd", max_epochs = 4, patience = 50)
        _, state = train(self.dataset, config)

        self.assertEqual(state.epoch, 4)
        self.assertEqual(state.stopped_reason, "max_epochs")

    def test_history(self):
        _, lm_state = train(self.dataset, TrainingConfig(hidden_layers = (3,), max_epochs = 3))
        _, gd_state = train(self.dataset, TrainingConfig(hidden_layers = (3,), algorithm = "gd", max_epochs = 3))

        lm_stream, gd_stream = io.StringIO(), io.StringIO()
        write_history(lm_state, lm_stream)
        write_history(gd_state, gd_stream)

        lm_lines = lm_stream.getvalue().splitlines()
        gd_lines = gd_stream.getvalue().splitlines()

        self.assertEqual(lm_lines[0], "epoch,train_mse,val_mse,best_val_mse,mu")
        self.assertEqual(len(lm_lines), 1 + lm_state.epoch)
        self.assertNotEqual(lm_lines[1].split(",")[-1], "")
        self.assertEqual(gd_lines[1].split(",")[-1], "")

    def test_mismatched_first_order_record(self):
        with self.assertRaises(ConfigurationError):
            TrainingConfig(algorithm = "gd", first_order = FirstOrderConfig(algorithm = "rprop"))

    def test_needs_a_validation_split(self):
        dataset = _synthetic_dataset().with_split(np.ones(80, dtype = bool))

        with self.assertRaises(ConfigurationError):
            train(dataset, self.config)

class TestModelSelection(unittest.TestCase):
    """
    ## Description:
    Cross-validation and the architecture sweep.
    """

    @classmethod
    def setUpClass(cls):
        cls.dataset = _synthetic_dataset(rows = 90, seed = 2)
        cls.config = TrainingConfig(hidden_layers = (3,), max_epochs = 5, training_fraction = 0.5)

    def test_cross_validation(self):
        result = cross_validate(self.dataset, self.config, folds = 3, seed = 1)

        self.assertEqual(len(result.fold_r_squared), 3)
        self.assertAlmostEqual(result.mean, float(np.nanmean(result.fold_r_squared)))
        self.assertGreaterEqual(result.half_width, 0.)

    def test_cross_validation_fold_bounds(self):
        with self.assertRaises(ConfigurationError):
            cross_validate(self.dataset, self.config, folds = 1)

    def test_sweep(self):
        results = sweep_architectures(self.dataset, self.config, layouts = [(2,), (2, 2)])

        self.assertEqual([result.hidden_layers for result in results], [(2,), (2, 2)])
        self.assertEqual([result.parameter_count for result in results], [9, 15])
        self.assertIsNone(results[0].cross_validation)

    def test_default_layouts(self):
        layouts = default_layouts()

        self.assertEqual(len(layouts), 24)
        self.assertIn((20, 20, 20), layouts)

if __name__ == "__main__":
    unittest.main()
