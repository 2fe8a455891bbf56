"""
Entry point for the feedforward regression network: the `MlpModel` record,
its forward pass, reverse-mode gradient, streamed Jacobian products, and the
JSON model file.

## Description:
A fully connected network with tanh hidden layers and a linear output. The
default layout is (2, 20, 20, 20, 1): two rank inputs (degree and
eigenvector) and one predicted rank.

## Notes:
1. Parameters are packed layer by layer, weights first (row-major, shape
out x in) then biases. Every vector that talks about "all parameters"
(gradients, Jacobian columns, LM steps) uses this order.
2. The trainer minimizes 1/2 SSE; `gradient` returns the gradient of 1/2 MSE,
so `J^T e` from `jacobian_accumulate` equals `gradient` times the batch size.
"""

# Native Library | json:
import json

# Native Library | dataclasses:
from dataclasses import dataclass, field, replace

# Native Library | typing:
from typing import List, Optional, Sequence, Tuple

# 3rd Party Library | NumPy:
import numpy as np

# Self-Import | constants:
from centrank_lib.constants import _JACOBIAN_CHUNK_SIZE, _MODEL_SCHEMA_VERSION, _WEIGHT_INITIALIZATION_SCALE

# Self-Import | statistics record:
from centrank_lib.ranking import NormalizationStats

# Self-Import | exceptions:
from centrank_lib.validation import SchemaMismatchError, require_seed

ACTIVATIONS = ("tanh", "identity")

TARGET_METRICS = ("betweenness", "closeness")

def _activate(name: str, values: np.ndarray) -> np.ndarray:

    # (1): Hidden layers:
    if name == "tanh":
        return np.tanh(values)

    # (2): Identity, the output layer:
    return values

def _activation_derivative(name: str, activated: np.ndarray) -> np.ndarray:
    """
    Derivative expressed through the *activated* values: 1 - a^2 for tanh.
    """
    # (1): tanh'(x) = 1 - tanh(x)^2:
    if name == "tanh":
        return 1. - np.square(activated)

    # (2): Identity:
    return np.ones_like(activated)

@dataclass(frozen = True, eq = False)
class MlpModel:
    """
    Welcome to the `MlpModel` class!

    ## Description:
    Immutable parameters and metadata of one network. Training produces new
    instances through `with_parameters`.

    :param tuple layer_sizes:
        Widths from input to output, e.g. (2, 20, 20, 20, 1).

    :param list weights:
        One (out x in) matrix per layer.

    :param list biases:
        One length-out vector per layer.
    """

    layer_sizes: Tuple[int, ...]
    weights: List[np.ndarray]
    biases: List[np.ndarray]
    hidden_activation: str = "tanh"
    output_activation: str = "identity"
    input_stats: Optional[NormalizationStats] = None
    output_stats: Optional[NormalizationStats] = None
    target_metric: Optional[str] = None
    training_provenance: dict = field(default_factory = dict)

    def __post_init__(self):

        # (X): Widths as plain ints, whatever sequence came in:
        object.__setattr__(self, "layer_sizes", tuple(int(width) for width in self.layer_sizes))

        # (1): An input and an output layer at least:
        if len(self.layer_sizes) < 2 or min(self.layer_sizes) < 1:
            raise SchemaMismatchError(f"> layer_sizes must hold at least two positive widths, got {self.layer_sizes}")

        # (2): One (weight, bias) pair per connection, shaped by the widths:
        if len(self.weights) != len(self.layer_sizes) - 1 or len(self.biases) != len(self.weights):
            raise SchemaMismatchError("> one weight matrix and one bias vector are needed per layer")

        for layer, (weight, bias) in enumerate(zip(self.weights, self.biases)):
            expected = (self.layer_sizes[layer + 1], self.layer_sizes[layer])

            # (2.1): If a shape disagrees with the widths...
            if weight.shape != expected or bias.shape != (expected[0],):
                raise SchemaMismatchError(
                    f"> layer {layer}: expected weight {expected} and bias ({expected[0]},), got {weight.shape} and {bias.shape}")

            # (2.2): ... or a parameter is NaN or infinite, refuse the model:
            if not (np.all(np.isfinite(weight)) and np.all(np.isfinite(bias))):
                raise ValueError(f"> layer {layer} holds non-finite parameters")

        # (3): Known activations and target:
        if self.hidden_activation not in ACTIVATIONS or self.output_activation not in ACTIVATIONS:
            raise SchemaMismatchError(f"> activations must be one of {ACTIVATIONS}")

        if self.target_metric is not None and self.target_metric not in TARGET_METRICS:
            raise SchemaMismatchError(f"> target_metric must be one of {TARGET_METRICS}, got '{self.target_metric}'")

    @property
    def layer_count(self) -> int:
        return len(self.weights)

    @property
    def parameter_count(self) -> int:
        return sum(weight.size + bias.size for weight, bias in zip(self.weights, self.biases))

    def activation_of(self, layer: int) -> str:

        # (X): The last layer uses the output activation:
        return self.output_activation if layer == self.layer_count - 1 else self.hidden_activation

    def pack(self) -> np.ndarray:
        """
        All parameters as one vector, in the packing order.
        """
        pieces = []

        # (1): Row-major weights, then the bias, layer by layer:
        for weight, bias in zip(self.weights, self.biases):
            pieces.append(weight.ravel())
            pieces.append(bias)

        return np.concatenate(pieces)

    def with_parameters(self, parameters: np.ndarray) -> "MlpModel":
        """
        A copy of the model carrying the packed `parameters`.
        """
        parameters = np.asarray(parameters, dtype = np.float64)

        # (X): Exactly one value per parameter:
        if parameters.shape != (self.parameter_count,):
            raise SchemaMismatchError(f"> expected {self.parameter_count} parameters, got {parameters.shape}")

        # (X): Read position in `parameters`:
        weights, biases = [], []
        position = 0

        # (1): Walk the vector in packing order, weights before biases:
        for weight, bias in zip(self.weights, self.biases):
            weights.append(parameters[position:position + weight.size].reshape(weight.shape).copy())
            position += weight.size
            biases.append(parameters[position:position + bias.size].copy())
            position += bias.size

        return replace(self, weights = weights, biases = biases)

def init_model(
        layer_sizes: Sequence[int],
        seed: int = 0,
        target_metric: Optional[str] = None,
        hidden_activation: str = "tanh") -> MlpModel:
    """
    ## Description:
    Weights and biases uniform in +-(0.7 / sqrt(fan_in)), drawn layer by layer
    from a PCG64 generator seeded with `seed`.
    """
    # (X): Validate the seed:
    require_seed("seed", seed)
    layer_sizes = tuple(int(width) for width in layer_sizes)

    # (1): One generator for the whole model, consumed layer by layer:
    rng = np.random.Generator(np.random.PCG64(seed))
    weights, biases = [], []

    # (2): Bound shrinks with the fan-in:
    for fan_in, fan_out in zip(layer_sizes[:-1], layer_sizes[1:]):
        bound = _WEIGHT_INITIALIZATION_SCALE / np.sqrt(fan_in)
        weights.append(rng.uniform(-bound, bound, size = (fan_out, fan_in)))
        biases.append(rng.uniform(-bound, bound, size = fan_out))

    # (3): Statistics and provenance are attached by the trainer:
    return MlpModel(
        layer_sizes = layer_sizes,
        weights = weights,
        biases = biases,
        hidden_activation = hidden_activation,
        target_metric = target_metric)

def _as_batch(model: MlpModel, inputs) -> Tuple[np.ndarray, bool]:
    inputs = np.asarray(inputs, dtype = np.float64)
    single = inputs.ndim == 1

    # (1): A lone sample becomes a batch of one:
    if single:
        inputs = inputs.reshape(1, -1)

    # (2): Width must match the input layer:
    if inputs.ndim != 2 or inputs.shape[1] != model.layer_sizes[0]:
        raise SchemaMismatchError(f"> the model takes {model.layer_sizes[0]} inputs per sample, got shape {inputs.shape}")

    # (3): No NaN or infinity reaches the layers:
    if not np.all(np.isfinite(inputs)):
        raise ValueError("> forward received non-finite input")

    return inputs, single

def _forward_layers(model: MlpModel, inputs: np.ndarray) -> List[np.ndarray]:
    """
    The activations of every layer, the inputs first and the outputs last.
    """
    # (X): The inputs count as layer 0:
    activations = [inputs]

    # (1): a_{l+1} = f(a_l W^T + b):
    for layer, (weight, bias) in enumerate(zip(model.weights, model.biases)):
        activations.append(_activate(model.activation_of(layer), activations[-1] @ weight.T + bias))

    return activations

def forward(model: MlpModel, inputs):
    """
    ## Description:
    Evaluate the network. A single input pair gives a float; an (N, 2)
    batch gives N outputs.

    ## Examples:
    A model whose parameters are all zero outputs 0 for any input.
    """
    batch, single = _as_batch(model, inputs)

    # (1): Only the last layer is kept:
    outputs = _forward_layers(model, batch)[-1][:, 0]

    # (2): A float for a single sample, an array for a batch:
    return float(outputs[0]) if single else outputs

def _backward(model: MlpModel, activations: List[np.ndarray], output_delta: np.ndarray) -> List[Tuple[np.ndarray, np.ndarray]]:
    """
    ## Description:
    Reverse-mode sweep summed over the batch: per layer (dW, db) given the
    derivative of the objective with respect to the output of each sample.
    """
    # (X): Filled from the last layer back:
    gradients = [None] * model.layer_count

    # (1): Through the output activation:
    delta = output_delta * _activation_derivative(model.output_activation, activations[-1])

    for layer in range(model.layer_count - 1, -1, -1):

        # (2): dW = delta^T a, db = sum of delta over the batch:
        gradients[layer] = (delta.T @ activations[layer], delta.sum(axis = 0))

        # (3): Back through the weights and the hidden activation:
        if layer > 0:
            delta = (delta @ model.weights[layer]) * _activation_derivative(model.hidden_activation, activations[layer])

    return gradients

def _pack_gradients(gradients: List[Tuple[np.ndarray, np.ndarray]]) -> np.ndarray:
    pieces = []

    # (1): Same order as `MlpModel.pack`:
    for weight_gradient, bias_gradient in gradients:
        pieces.append(weight_gradient.ravel())
        pieces.append(bias_gradient)

    return np.concatenate(pieces)

def gradient(model: MlpModel, inputs, targets) -> np.ndarray:
    """
    ## Description:
    Exact gradient of 1/2 MSE over the batch, packed like `MlpModel.pack`.
    """
    # (X): Coerce the batch and the targets:
    batch, _ = _as_batch(model, inputs)
    targets = np.asarray(targets, dtype = np.float64).reshape(-1)

    # (X): One target per sample:
    if batch.shape[0] == 0 or targets.shape[0] != batch.shape[0]:
        raise ValueError("> gradient needs a non-empty batch with one target per sample")

    # (1): Forward pass, keeping every layer:
    activations = _forward_layers(model, batch)
    residuals = activations[-1][:, 0] - targets

    # (2): d(1/2 MSE) / d output = residual / N:
    return _pack_gradients(_backward(model, activations, (residuals / batch.shape[0]).reshape(-1, 1)))

def sum_squared_error(model: MlpModel, inputs, targets) -> float:

    # (1): Predictions for the whole batch:
    predictions = forward(model, np.atleast_2d(inputs))
    # (2): Sum of squared residuals:
    return float(np.sum(np.square(predictions - np.asarray(targets, dtype = np.float64).reshape(-1))))

def mean_squared_error_of(model: MlpModel, inputs, targets) -> float:
    targets = np.asarray(targets, dtype = np.float64).reshape(-1)

    # (X): Undefined on an empty split:
    if targets.size == 0:
        return float("nan")

    # (X): SSE / N:
    return sum_squared_error(model, inputs, targets) / targets.size

def jacobian_rows(model: MlpModel, inputs) -> np.ndarray:
    """
    ## Description:
    d output / d parameters for every sample: an (N, p) matrix whose columns
    follow the packing order.
    """
    # (X): Forward pass, keeping every layer:
    batch, _ = _as_batch(model, inputs)
    activations = _forward_layers(model, batch)

    # (1): Column blocks (weights, biases) per layer, filled from the output back:
    columns = [None] * (2 * model.layer_count)
    delta = _activation_derivative(model.output_activation, activations[-1])

    for layer in range(model.layer_count - 1, -1, -1):
        # (X): Per-sample outer products delta_i a_i^T, flattened row-major:
        per_sample = np.einsum("no,ni->noi", delta, activations[layer])
        columns[2 * layer] = per_sample.reshape(batch.shape[0], -1)

        # (X): Bias columns are the deltas themselves:
        columns[2 * layer + 1] = delta

        # (2): Propagate to the previous layer:
        if layer > 0:
            delta = (delta @ model.weights[layer]) * _activation_derivative(model.hidden_activation, activations[layer])

    # (3): Columns in packing order:
    return np.concatenate(columns, axis = 1)

def jacobian_accumulate(
        model: MlpModel,
        inputs,
        targets,
        chunk_size: int = _JACOBIAN_CHUNK_SIZE) -> Tuple[np.ndarray, np.ndarray, float]:
    """
    ## Description:
    (J^T J, J^T e, SSE) with e = output - target, accumulated chunk by chunk so
    the full N x p Jacobian never exists. Chunks are summed in order; J^T J is
    symmetrized at the end.

    ## Examples:
    One sample x, one linear weight w: J^T J = x^2, J^T e = x (w x - t).
    """
    batch, _ = _as_batch(model, inputs)
    targets = np.asarray(targets, dtype = np.float64).reshape(-1)

    # (X): One target per sample:
    if targets.shape[0] != batch.shape[0]:
        raise ValueError("> one target per sample is required")

    # (1): Accumulators:
    parameter_count = model.parameter_count
    normal_matrix = np.zeros((parameter_count, parameter_count))
    gradient_vector = np.zeros(parameter_count)
    sse = 0.

    # (2): One chunk of Jacobian rows at a time:
    for start in range(0, batch.shape[0], chunk_size):
        chunk = batch[start:start + chunk_size]
        residuals = forward(model, chunk) - targets[start:start + chunk_size]
        rows = jacobian_rows(model, chunk)

        # (2.1): Add this chunk's contribution:
        normal_matrix += rows.T @ rows
        gradient_vector += rows.T @ residuals
        sse += float(residuals @ residuals)

    # (3): Symmetrize against round-off:
    return 0.5 * (normal_matrix + normal_matrix.T), gradient_vector, sse

def model_to_dict(model: MlpModel) -> dict:
    """
    ## Description:
    The JSON document of a model file.
    """
    # (X): Arrays become nested lists, stats their own dictionaries:
    return {
        "schema_version": _MODEL_SCHEMA_VERSION,
        "target_metric": model.target_metric,
        "layer_sizes": list(model.layer_sizes),
        "hidden_activation": model.hidden_activation,
        "output_activation": model.output_activation,
        "weights": [weight.tolist() for weight in model.weights],
        "biases": [bias.tolist() for bias in model.biases],
        "input_stats": model.input_stats.to_dict() if model.input_stats is not None else None,
        "output_stats": model.output_stats.to_dict() if model.output_stats is not None else None,
        "training_provenance": model.training_provenance,
    }

def model_from_dict(document: dict) -> MlpModel:

    # (X): If the JSON is not an object, it is not a model:
    if not isinstance(document, dict):
        raise SchemaMismatchError("> a model document must be a JSON object")

    # (1): Refuse files written by another schema:
    if document.get("schema_version") != _MODEL_SCHEMA_VERSION:
        raise SchemaMismatchError(
            f"> unsupported model schema_version {document.get('schema_version')!r} (expected {_MODEL_SCHEMA_VERSION})")

    # (2): Rebuild; `MlpModel` re-checks every shape:
    try:
        return MlpModel(
            layer_sizes = tuple(document["layer_sizes"]),
            weights = [np.asarray(weight, dtype = np.float64) for weight in document["weights"]],
            biases = [np.asarray(bias, dtype = np.float64) for bias in document["biases"]],
            hidden_activation = document["hidden_activation"],
            output_activation = document["output_activation"],
            input_stats = NormalizationStats.from_dict(document["input_stats"]) if document.get("input_stats") else None,
            output_stats = NormalizationStats.from_dict(document["output_stats"]) if document.get("output_stats") else None,
            target_metric = document.get("target_metric"),
            training_provenance = document.get("training_provenance") or {})

    # (3): A missing field is a schema mismatch:
    except KeyError as error:
        raise SchemaMismatchError(f"> model document misses field {error}") from error

def save_model(model: MlpModel, path) -> None:
    """
    ## Description:
    Write the model as JSON. Floats are written with their shortest exact
    representation, so loading gives bit-identical parameters.
    """
    # (X): Sorted keys, so the same model always gives the same bytes:
    with open(path, "w", encoding = "utf-8", newline = "\n") as stream:
        stream.write(json.dumps(model_to_dict(model), sort_keys = True, indent = 1) + "\n")

def load_model(path) -> MlpModel:

    # (1): Parse the JSON:
    with open(path, "r", encoding = "utf-8") as stream:
        try:
            document = json.load(stream)

        except json.JSONDecodeError as error:
            raise SchemaMismatchError(f"> {path} is not a model file: {error}") from error

    # (2): Rebuild and check:
    return model_from_dict(document)
