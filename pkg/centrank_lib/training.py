"""
Entry point for training: one Levenberg-Marquardt epoch, the first-order
baselines (GD, GD with momentum, Rprop), the full-batch training loop with
validation-based early stopping, k-fold cross-validation, and the
architecture sweep.

## Notes:
1. Every epoch is one full batch: the update is computed from all training
rows at once.
2. The loop keeps a snapshot of the parameters with the best validation MSE
and returns that snapshot, not the last iterate.
"""

# Native Library | csv:
import csv

# Native Library | time:
import time

# Native Library | dataclasses:
from dataclasses import dataclass, field, replace

# Native Library | typing:
from typing import List, Optional, Sequence, TextIO, Tuple

# 3rd Party Library | NumPy:
import numpy as np

# 3rd Party Library | SciPy:
from scipy import linalg

# Self-Import | constants:
from centrank_lib.constants import _ARCHITECTURE_GROUPS, _RPROP_MINIMUM_STEP

# Self-Import | the dataset:
from centrank_lib.dataset import Dataset

# Self-Import | the network:
from centrank_lib.network import (
    MlpModel,
    forward,
    gradient,
    init_model,
    jacobian_accumulate,
    mean_squared_error_of,
    sum_squared_error)

# Self-Import | statistics:
from centrank_lib.ranking import confidence_interval, r_squared

# Self-Import | trainer records:
from centrank_lib.training_inputs import FirstOrderConfig, LmConfig, TrainingConfig

# Self-Import | exceptions:
from centrank_lib.validation import ConfigurationError, require_positive_integer, require_seed

HISTORY_HEADER = ("epoch", "train_mse", "val_mse", "best_val_mse", "mu")

@dataclass(frozen = True)
class EpochRecord:
    epoch: int
    train_mse: float
    val_mse: float
    best_val_mse: float
    mu: Optional[float] = None

@dataclass
class TrainState:
    """
    Welcome to the `TrainState` class!

    ## Description:
    Book-keeping of one training run: the epoch counter, the latest MSEs, the
    best validation MSE and its parameter snapshot, the epochs since the last
    improvement, and the current damping mu (LM only).
    """

    patience: int
    epoch: int = 0
    train_mse: float = float("inf")
    val_mse: float = float("inf")
    best_val_mse: float = float("inf")
    best_parameters: Optional[np.ndarray] = None
    best_epoch: int = 0
    epochs_without_improvement: int = 0
    mu: Optional[float] = None
    terminated: bool = False
    stopped_reason: Optional[str] = None
    history: List[EpochRecord] = field(default_factory = list)

    def record(self, train_mse: float, val_mse: float, parameters: np.ndarray) -> bool:
        """
        ## Description:
        Close one epoch. Returns True when early stopping fires.
        """
        # (1): Advance the counter:
        self.epoch += 1
        self.train_mse = train_mse
        self.val_mse = val_mse

        # (2): Strict improvement takes a new snapshot and resets patience:
        if val_mse < self.best_val_mse:
            self.best_val_mse = val_mse
            self.best_parameters = np.array(parameters, copy = True)
            self.best_epoch = self.epoch
            self.epochs_without_improvement = 0

        # (2.1): Otherwise patience runs down:
        else:
            self.epochs_without_improvement += 1

        # (3): History row, mu as it stands after the update:
        self.history.append(EpochRecord(
            epoch = self.epoch,
            train_mse = train_mse,
            val_mse = val_mse,
            best_val_mse = self.best_val_mse,
            mu = self.mu))

        # (4): Early stopping:
        if self.epochs_without_improvement >= self.patience:
            self.stopped_reason = "early_stopping"
            return True

        # (5): Keep going:
        return False

@dataclass
class FirstOrderState:
    """
    Memory of the first-order rules between epochs.
    """

    previous_step: Optional[np.ndarray] = None
    previous_gradient: Optional[np.ndarray] = None
    step_sizes: Optional[np.ndarray] = None

@dataclass(frozen = True)
class CrossValidationResult:
    fold_r_squared: Tuple[float, ...]
    mean: float
    half_width: float

@dataclass(frozen = True)
class ArchitectureResult:
    hidden_layers: Tuple[int, ...]
    parameter_count: int
    validation_mse: float
    validation_r_squared: float
    cross_validation: Optional[CrossValidationResult] = None

def lm_epoch(
        model: MlpModel,
        inputs: np.ndarray,
        targets: np.ndarray,
        state: TrainState,
        config: LmConfig,
        debugging: bool = False) -> Tuple[MlpModel, TrainState]:
    """
    ## Description:
    One Levenberg-Marquardt epoch.

    ## Detailed Description:
    Solve (J^T J + mu I) delta = -J^T e. If the candidate lowers the SSE the
    step is accepted and mu shrinks by `config.mu_decrease`; otherwise mu grows
    by `config.mu_increase` and the system is solved again. A solve that fails
    counts as a rejection. Once mu exceeds `config.mu_max` the epoch ends
    without an update and `state.terminated` is set.
    """
    # (X): A fresh state starts from mu0:
    if state.mu is None:
        state.mu = config.mu0

    # (1): J^T J, J^T e and SSE at the current parameters, once per epoch:
    normal_matrix, gradient_vector, sse = jacobian_accumulate(model, inputs, targets)
    parameters = model.pack()
    identity = np.eye(parameters.size)

    # (X): Retry with larger mu until a step lowers the SSE:
    while True:

        # (2): Damping ceiling ends training:
        if state.mu > config.mu_max:
            state.terminated = True
            state.stopped_reason = "mu_max"
            return model, state

        # (3): Damped normal equations, solved by Cholesky:
        try:
            factor = linalg.cho_factor(normal_matrix + state.mu * identity)
            step = linalg.cho_solve(factor, -gradient_vector)

        # (3.1): A failed factorization counts as a rejection:
        except linalg.LinAlgError:
            if debugging:
                print(f"> [DEBUGGING]: Cholesky failed at mu = {state.mu:.3e}; increasing mu.")

            state.mu *= config.mu_increase
            continue

        # (4): Evaluate the candidate step:
        candidate = model.with_parameters(parameters + step) if np.all(np.isfinite(step)) else None
        candidate_sse = sum_squared_error(candidate, inputs, targets) if candidate is not None else float("inf")

        # (4.1): If the user wants every trial step...
        if debugging:
            print(f"> [DEBUGGING]: mu = {state.mu:.3e}, SSE {sse:.6e} -> {candidate_sse:.6e}")

        # (5): Accept and relax the damping:
        if candidate_sse < sse:
            state.mu *= config.mu_decrease
            return candidate, state

        # (6): Reject and damp harder:
        state.mu *= config.mu_increase

def first_order_epoch(
        model: MlpModel,
        inputs: np.ndarray,
        targets: np.ndarray,
        memory: FirstOrderState,
        config: FirstOrderConfig) -> Tuple[MlpModel, FirstOrderState]:
    """
    ## Description:
    One full-batch step of `gd`, `gdm` (dX = mc dX_prev - lr (1 - mc) g), or
    `rprop` (per-parameter steps, grown on an unchanged gradient sign,
    shrunk on a change, kept within [1e-12, max step]).
    """
    # (X): Full-batch gradient at the current parameters:
    grad = gradient(model, inputs, targets)
    parameters = model.pack()

    # (1): Plain gradient descent:
    if config.algorithm == "gd":
        step = -config.learning_rate * grad

    # (2): Momentum:
    elif config.algorithm == "gdm":
        previous = memory.previous_step if memory.previous_step is not None else np.zeros_like(grad)
        step = config.momentum * previous - config.learning_rate * (1. - config.momentum) * grad

    # (3): Rprop:
    else:
        # (3.1): First epoch: initial steps, no previous gradient:
        if memory.step_sizes is None:
            memory.step_sizes = np.full(grad.size, config.rprop_initial_step)
            memory.previous_gradient = np.zeros_like(grad)

        # (3.2): Grow on an unchanged sign, shrink on a change, then clip:
        agreement = np.sign(grad) * np.sign(memory.previous_gradient)

        memory.step_sizes = np.where(agreement > 0, memory.step_sizes * config.rprop_increase, memory.step_sizes)
        memory.step_sizes = np.where(agreement < 0, memory.step_sizes * config.rprop_decrease, memory.step_sizes)
        memory.step_sizes = np.clip(memory.step_sizes, _RPROP_MINIMUM_STEP, config.rprop_max_step)

        # (X): After a sign change the gradient is forgotten for one epoch:
        grad = np.where(agreement < 0, 0., grad)
        step = -np.sign(grad) * memory.step_sizes

        memory.previous_gradient = grad

    # (4): Remember the step, then apply it:
    memory.previous_step = step

    return model.with_parameters(parameters + step), memory

def _provenance(config: TrainingConfig, dataset: Dataset, state: TrainState, validation_r2: float) -> dict:

    # (X): Everything needed to rerun the training:
    return {
        "algorithm": config.algorithm,
        "config": config.to_dict(),
        "seeds": {"initialization": config.seed, "dataset_split": dataset.seed},
        "manifest_sha256": dataset.manifest_sha256,
        "epochs": state.epoch,
        "best_epoch": state.best_epoch,
        "best_validation_mse": state.best_val_mse,
        "validation_r2": validation_r2,
        "stopped_reason": state.stopped_reason,
    }

def train(
        dataset: Dataset,
        config: TrainingConfig,
        verbose: bool = False,
        debugging: bool = False) -> Tuple[MlpModel, TrainState]:
    """
    ## Description:
    Initialize a network from `config.seed` and train it full batch on the
    dataset's training rows, checking the validation rows after every epoch.

    ## Detailed Description:
    Training stops when the validation MSE has not improved for
    `config.patience` epochs, when `config.max_epochs` is reached, when LM's mu
    exceeds its ceiling, or when the optional time budget runs out. The
    returned model carries the best validation snapshot, the dataset's
    normalization stats and the training provenance.

    :param Dataset dataset:
        Rows with their split.

    :param TrainingConfig config:
        Architecture, algorithm and stopping rules.
    """
    # (X): If the configuration is not a `TrainingConfig`, refuse it:
    if not isinstance(config, TrainingConfig):
        raise TypeError("> 'config' must be a TrainingConfig instance.")

    # (1): Standardized splits:
    train_inputs, train_targets, validation_inputs, validation_targets = dataset.split()

    # (1.1): Early stopping needs validation rows:
    if train_targets.size == 0 or validation_targets.size == 0:
        raise ConfigurationError("> both the training and the validation split must be non-empty")

    # (2): Two rank inputs, one predicted rank:
    layer_sizes = (2,) + tuple(config.hidden_layers) + (1,)
    model = init_model(layer_sizes, seed = config.seed, target_metric = dataset.target_metric)

    # (3): Loop state:
    state = TrainState(patience = config.patience)
    memory = FirstOrderState()

    # (3.1): LM starts from its initial damping:
    if config.algorithm == "lm":
        state.mu = config.lm.mu0

    start = time.perf_counter()

    # (3.2): If the user wants to know what is being trained...
    if verbose:
        print(f"> [VERBOSE]: Training {layer_sizes} with {config.algorithm} on {train_targets.size} rows, validating on {validation_targets.size}.")

    # (4): Epochs:
    while state.epoch < config.max_epochs:

        # (4.1): One full-batch update:
        if config.algorithm == "lm":
            model, state = lm_epoch(model, train_inputs, train_targets, state, config.lm, debugging = debugging)

        else:
            model, memory = first_order_epoch(model, train_inputs, train_targets, memory, config.first_order)

        # (4.2): Score it and update the snapshot:
        train_mse = mean_squared_error_of(model, train_inputs, train_targets)
        validation_mse = mean_squared_error_of(model, validation_inputs, validation_targets)

        if state.record(train_mse, validation_mse, model.pack()):
            break

        # (4.2.1): ... and report every tenth epoch:
        if verbose and state.epoch % 10 == 0:
            print(f"> [VERBOSE]: epoch {state.epoch}: train MSE {train_mse:.6e}, validation MSE {validation_mse:.6e}")

        # (4.3): The other stopping rules:
        if state.terminated:
            break

        if config.time_budget is not None and time.perf_counter() - start > config.time_budget:
            state.stopped_reason = "time_budget"
            break

    # (X): The loop ran out of epochs:
    if state.stopped_reason is None:
        state.stopped_reason = "max_epochs"

    # (5): Roll back to the best validation snapshot:
    best = model.with_parameters(state.best_parameters)
    validation_r2 = _safe_r_squared(forward(best, validation_inputs), validation_targets)

    if verbose:
        print(f"> [VERBOSE]: Stopped ({state.stopped_reason}) after {state.epoch} epochs; best validation MSE {state.best_val_mse:.6e} at epoch {state.best_epoch}.")

    # (6): Attach what `predict` needs to undo the normalization:
    best = replace(
        best,
        input_stats = dataset.input_stats,
        output_stats = dataset.output_stats,
        training_provenance = _provenance(config, dataset, state, validation_r2))

    return best, state

def _safe_r_squared(prediction: np.ndarray, target: np.ndarray) -> float:

    # (X): NaN when the target is constant:
    try:
        return r_squared(prediction, target)

    except ValueError:
        return float("nan")

def write_history(state: TrainState, stream: TextIO) -> None:
    """
    ## Description:
    One CSV row per epoch; the `mu` cell is empty for first-order training.
    """
    # (1): Header:
    writer = csv.writer(stream, lineterminator = "\n")
    writer.writerow(HISTORY_HEADER)

    # (2): Rows, floats written with repr:
    for record in state.history:
        writer.writerow([
            record.epoch,
            repr(record.train_mse),
            repr(record.val_mse),
            repr(record.best_val_mse),
            "" if record.mu is None else repr(record.mu)])

def cross_validate(
        dataset: Dataset,
        config: TrainingConfig,
        folds: int = 10,
        seed: int = 0,
        verbose: bool = False) -> CrossValidationResult:
    """
    ## Description:
    k-fold cross-validation. Each fold is held out in turn; the remaining
    rows are split again (training fraction of `config`) for early stopping,
    and the R^2 of the trained model is measured on the held-out fold.
    """
    # (X): At least two folds, at most one row per fold:
    require_positive_integer("folds", folds)
    require_seed("seed", seed)

    if folds < 2 or folds > dataset.size:
        raise ConfigurationError(f"> folds must lie in [2, {dataset.size}], got {folds}")

    # (1): Shuffle once, cut into near-equal folds:
    rng = np.random.Generator(np.random.PCG64(seed))
    permutation = rng.permutation(dataset.size)
    fold_rows = np.array_split(permutation, folds)

    scores = []

    for fold, held_out in enumerate(fold_rows):
        # (2): Fit and early-stopping rows from the other folds:
        remaining = np.setdiff1d(permutation, held_out)
        is_training = rng.random(remaining.size) < config.training_fraction

        # (2.1): Train on them:
        fold_dataset = dataset.subset(remaining).with_split(is_training)
        model, _ = train(fold_dataset, config)

        # (3): Standardize the held-out fold with the fold's own stats:
        test = dataset.subset(np.sort(held_out))
        test_inputs = (test.inputs - fold_dataset.input_stats.mean) / fold_dataset.input_stats.std
        test_targets = (test.labels - fold_dataset.output_stats.mean[0]) / fold_dataset.output_stats.std[0]

        # (3.1): R^2 on the held-out fold:
        scores.append(_safe_r_squared(forward(model, test_inputs), test_targets))

        if verbose:
            print(f"> [VERBOSE]: fold {fold + 1}/{folds}: R^2 = {scores[-1]:.4f}")

    # (4): Mean R^2 +- 99% half width:
    mean, half_width = confidence_interval(scores)

    return CrossValidationResult(fold_r_squared = tuple(scores), mean = mean, half_width = half_width)

def default_layouts() -> List[Tuple[int, ...]]:

    # (X): One, two and three hidden layers, flattened:
    return [layout for group in _ARCHITECTURE_GROUPS for layout in group]

def sweep_architectures(
        dataset: Dataset,
        config: TrainingConfig,
        layouts: Optional[Sequence[Tuple[int, ...]]] = None,
        folds: Optional[int] = None,
        verbose: bool = False) -> List[ArchitectureResult]:
    """
    ## Description:
    Train one network per hidden layout (by default the parameter-matched
    groups of one, two and three hidden layers) and report validation MSE
    and R^2, plus cross-validated R^2 when `folds` is given.
    """
    results = []

    for layout in (layouts if layouts is not None else default_layouts()):

        # (1): Same settings, another hidden layout:
        layout_config = replace(config, hidden_layers = tuple(layout))
        model, state = train(dataset, layout_config)

        # (2): Optional cross-validated R^2:
        cross_validation = cross_validate(dataset, layout_config, folds = folds, seed = config.seed) if folds else None

        # (3): Record the layout:
        results.append(ArchitectureResult(
            hidden_layers = tuple(layout),
            parameter_count = model.parameter_count,
            validation_mse = state.best_val_mse,
            validation_r_squared = model.training_provenance["validation_r2"],
            cross_validation = cross_validation))

        if verbose:
            print(f"> [VERBOSE]: layout {tuple(layout)} ({model.parameter_count} parameters): validation MSE {state.best_val_mse:.6e}")

    return results
