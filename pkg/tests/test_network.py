"""
## Description:
Here, we test the feedforward network: the forward pass, the reverse-mode
gradient against central finite differences, the streamed Jacobian
products against the gradient, and the model file.
"""

# (X): Native Library | json:
import json

# (X): Native Library | os:
import os

# (X): Native Library | tempfile:
import tempfile

# (X): Native Library | unittest:
import unittest

# (X): External Library | NumPy:
import numpy as np

# (X): Self-Import | the network:
from centrank_lib.network import (
    MlpModel,
    forward,
    gradient,
    init_model,
    jacobian_accumulate,
    jacobian_rows,
    load_model,
    mean_squared_error_of,
    model_to_dict,
    save_model)

# (X): Self-Import | statistics record:
from centrank_lib.ranking import NormalizationStats

# (X): Self-Import | exceptions:
from centrank_lib.validation import SchemaMismatchError

class TestForward(unittest.TestCase):
    """
    ## Description:
    Shapes, the zero model, and the initialization bounds.
    """

    # (X): The default layout:
    LAYOUT = (2, 20, 20, 20, 1)

    def test_zero_parameters_give_zero(self):
        model = init_model(self.LAYOUT, seed = 0)
        zero = model.with_parameters(np.zeros(model.parameter_count))

        self.assertEqual(forward(zero, [0.3, -0.7]), 0.)
        np.testing.assert_array_equal(forward(zero, np.ones((4, 2))), np.zeros(4))

    def test_parameter_count(self):
        model = init_model(self.LAYOUT, seed = 0)

        self.assertEqual(model.parameter_count, 2 * 20 + 20 + 20 * 20 + 20 + 20 * 20 + 20 + 20 + 1)
        self.assertEqual(model.pack().size, model.parameter_count)

    def test_initialization_bounds(self):
        model = init_model(self.LAYOUT, seed = 4)

        for weight, bias in zip(model.weights, model.biases):
            bound = 0.7 / np.sqrt(weight.shape[1])

            self.assertLessEqual(float(np.abs(weight).max()), bound)
            self.assertLessEqual(float(np.abs(bias).max()), bound)

    def test_same_seed_same_model(self):
        np.testing.assert_array_equal(init_model(self.LAYOUT, seed = 9).pack(), init_model(self.LAYOUT, seed = 9).pack())

    def test_linear_model(self):
        model = MlpModel(
            layer_sizes = (2, 1),
            weights = [np.array([[2., -1.]])],
            biases = [np.array([0.5])])

        self.assertEqual(forward(model, [1., 3.]), -0.5)

    def test_wrong_width_is_refused(self):
        with self.assertRaises(SchemaMismatchError):
            forward(init_model((2, 3, 1)), np.ones((2, 3)))

    def test_non_finite_input_is_refused(self):
        with self.assertRaises(ValueError):
            forward(init_model((2, 3, 1)), [float("nan"), 0.])

    def test_inconsistent_shapes_are_refused(self):
        with self.assertRaises(SchemaMismatchError):
            MlpModel(layer_sizes = (2, 1), weights = [np.ones((2, 1))], biases = [np.ones(1)])

class TestDerivatives(unittest.TestCase):
    """
    ## Description:
    Analytic derivatives against numerical ones.
    """

    @classmethod
    def setUpClass(cls):
        rng = np.random.Generator(np.random.PCG64(1))

        cls.model = init_model((2, 5, 4, 1), seed = 3)
        cls.inputs = rng.uniform(-1., 1., size = (12, 2))
        cls.targets = rng.uniform(-1., 1., size = 12)

    def _half_mse(self, parameters):
        return 0.5 * mean_squared_error_of(self.model.with_parameters(parameters), self.inputs, self.targets)

    def test_gradient_matches_finite_differences(self):
        parameters = self.model.pack()
        analytic = gradient(self.model, self.inputs, self.targets)
        step = 1e-6

        numeric = np.empty_like(parameters)

        for index in range(parameters.size):
            shift = np.zeros_like(parameters)
            shift[index] = step
            numeric[index] = (self._half_mse(parameters + shift) - self._half_mse(parameters - shift)) / (2. * step)

        np.testing.assert_allclose(analytic, numeric, rtol = 1e-5, atol = 1e-8)

    def test_jacobian_rows_match_finite_differences(self):
        parameters = self.model.pack()
        rows = jacobian_rows(self.model, self.inputs[:3])
        step = 1e-6

        for index in range(0, parameters.size, 5):
            shift = np.zeros_like(parameters)
            shift[index] = step
            numeric = (
                forward(self.model.with_parameters(parameters + shift), self.inputs[:3])
                - forward(self.model.with_parameters(parameters - shift), self.inputs[:3])) / (2. * step)

            np.testing.assert_allclose(rows[:, index], numeric, rtol = 1e-5, atol = 1e-8)

    def test_normal_equations_agree_with_gradient(self):
        normal_matrix, gradient_vector, sse = jacobian_accumulate(self.model, self.inputs, self.targets)

        np.testing.assert_allclose(gradient_vector, gradient(self.model, self.inputs, self.targets) * self.inputs.shape[0], rtol = 1e-10, atol = 1e-12)
        np.testing.assert_allclose(normal_matrix, normal_matrix.T)
        self.assertAlmostEqual(sse, mean_squared_error_of(self.model, self.inputs, self.targets) * self.inputs.shape[0])

    def test_chunking_does_not_change_the_sums(self):
        whole = jacobian_accumulate(self.model, self.inputs, self.targets, chunk_size = 100)
        chunked = jacobian_accumulate(self.model, self.inputs, self.targets, chunk_size = 5)

        np.testing.assert_allclose(whole[0], chunked[0], rtol = 1e-12, atol = 1e-14)
        np.testing.assert_allclose(whole[1], chunked[1], rtol = 1e-12, atol = 1e-14)

    def test_single_linear_weight(self):
        model = MlpModel(layer_sizes = (1, 1), weights = [np.array([[2.]])], biases = [np.array([0.])])
        normal_matrix, gradient_vector, sse = jacobian_accumulate(model, np.array([[3.]]), np.array([5.]))

        # (X): Columns are (w, b); the output is w x + b:
        np.testing.assert_allclose(normal_matrix, [[9., 3.], [3., 1.]])
        np.testing.assert_allclose(gradient_vector, [3., 1.])
        self.assertEqual(sse, 1.)

class TestModelFile(unittest.TestCase):
    """
    ## Description:
    Saved models reload with identical parameters and metadata.
    """

    def test_save_and_load(self):
        model = init_model((2, 6, 1), seed = 2, target_metric = "closeness")
        model = MlpModel(
            layer_sizes = model.layer_sizes,
            weights = model.weights,
            biases = model.biases,
            input_stats = NormalizationStats(mean = np.array([0.1, -0.2]), std = np.array([0.5, 0.6])),
            output_stats = NormalizationStats(mean = np.array([0.]), std = np.array([0.58])),
            target_metric = "closeness",
            training_provenance = {"algorithm": "lm", "seed": 2})

        with tempfile.TemporaryDirectory() as directory:
            path = os.path.join(directory, "model.json")
            save_model(model, path)
            restored = load_model(path)

        np.testing.assert_array_equal(restored.pack(), model.pack())
        np.testing.assert_array_equal(restored.input_stats.std, [0.5, 0.6])
        self.assertEqual(restored.target_metric, "closeness")
        self.assertEqual(restored.training_provenance, {"algorithm": "lm", "seed": 2})
        self.assertEqual(forward(restored, [0.2, 0.4]), forward(model, [0.2, 0.4]))

    def test_unknown_schema_is_refused(self):
        document = model_to_dict(init_model((2, 3, 1)))
        document["schema_version"] = 99

        with tempfile.TemporaryDirectory() as directory:
            path = os.path.join(directory, "model.json")

            with open(path, "w", encoding = "utf-8") as stream:
                json.dump(document, stream)

            with self.assertRaises(SchemaMismatchError):
                load_model(path)

    def test_garbage_is_refused(self):
        with tempfile.TemporaryDirectory() as directory:
            path = os.path.join(directory, "model.json")

            with open(path, "w", encoding = "utf-8") as stream:
                stream.write("not json")

            with self.assertRaises(SchemaMismatchError):
                load_model(path)

if __name__ == "__main__":
    unittest.main()
