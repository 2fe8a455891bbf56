"""
The entry point for the trainer dataclasses: `LmConfig`, `FirstOrderConfig`,
and the `TrainingConfig` that bundles one of them with the architecture and
the stopping rules.
"""

# (1): Import the specialized `dataclass` library:
from dataclasses import dataclass, field, asdict

# Native Library | typing:
from typing import Optional, Tuple

# (2): Self-Import | validation helpers:
from centrank_lib.validation import (
    ConfigurationError,
    require_positive_integer,
    require_positive_real,
    require_seed)

# (3): Self-Import | defaults:
from centrank_lib.constants import (
    _DEFAULT_HIDDEN_LAYERS,
    _EARLY_STOPPING_PATIENCE,
    _GD_LEARNING_RATE,
    _GDM_MOMENTUM,
    _LM_INITIAL_MU,
    _LM_MAXIMUM_MU,
    _LM_MU_DECREASE_FRACTION,
    _LM_MU_INCREASE,
    _MAXIMUM_EPOCHS,
    _RPROP_DECREASE,
    _RPROP_INCREASE,
    _RPROP_INITIAL_STEP,
    _RPROP_MAXIMUM_STEP,
    _TRAINING_FRACTION)

ALGORITHMS = ("lm", "gd", "gdm", "rprop")

@dataclass(frozen = True)
class LmConfig:
    """
    Welcome to the `LmConfig` dataclass!

    ## Description:
    The damping schedule of Levenberg-Marquardt. On an accepted step mu is
    multiplied by `mu_decrease_fraction * mu_increase` (0.1 x 1.5 = 0.15 by
    default); on a rejected step it is multiplied by `mu_increase`. Training
    terminates once mu exceeds `mu_max`.

    ## Notes:
    To express an *absolute* decrease factor d, set
    `mu_decrease_fraction = d / mu_increase`.
    """

    # (1): Initial Marquardt adjustment:
    mu0: float = _LM_INITIAL_MU

    # (2): Upper bound on mu:
    mu_max: float = _LM_MAXIMUM_MU

    # (3): Multiplier after a rejected step:
    mu_increase: float = _LM_MU_INCREASE

    # (4): Decrease as a proportion of the increase factor:
    mu_decrease_fraction: float = _LM_MU_DECREASE_FRACTION

    def __post_init__(self):
        require_positive_real("mu0", self.mu0)
        require_positive_real("mu_max", self.mu_max)
        require_positive_real("mu_increase", self.mu_increase)
        require_positive_real("mu_decrease_fraction", self.mu_decrease_fraction)

        if not self.mu_increase > 1.:
            raise ConfigurationError(f"> mu_increase must be > 1, got {self.mu_increase}.")

        if not 0. < self.mu_decrease < 1.:
            raise ConfigurationError(f"> effective mu decrease must lie in (0, 1), got {self.mu_decrease}.")

        if not self.mu0 < self.mu_max:
            raise ConfigurationError(f"> mu0 ({self.mu0}) must be below mu_max ({self.mu_max}).")

    @property
    def mu_decrease(self) -> float:
        """
        The effective multiplier applied after an accepted step.
        """
        return self.mu_decrease_fraction * self.mu_increase

@dataclass(frozen = True)
class FirstOrderConfig:
    """
    ## Description:
    Parameters of the first-order baselines: plain gradient descent (`gd`),
    gradient descent with momentum (`gdm`), and resilient backpropagation
    (`rprop`).
    """

    # (1): `gd`, `gdm`, or `rprop`:
    algorithm: str = "gd"

    # (2): Step length of gd/gdm:
    learning_rate: float = _GD_LEARNING_RATE

    # (3): Momentum constant of gdm:
    momentum: float = _GDM_MOMENTUM

    # (4): Rprop initial per-weight step:
    rprop_initial_step: float = _RPROP_INITIAL_STEP

    # (5): Rprop step growth on an unchanged gradient sign:
    rprop_increase: float = _RPROP_INCREASE

    # (6): Rprop step shrink on a sign change:
    rprop_decrease: float = _RPROP_DECREASE

    # (7): Rprop step ceiling:
    rprop_max_step: float = _RPROP_MAXIMUM_STEP

    def __post_init__(self):
        if self.algorithm not in ("gd", "gdm", "rprop"):
            raise ConfigurationError(f"> first-order algorithm must be gd, gdm or rprop, got '{self.algorithm}'.")

        require_positive_real("learning_rate", self.learning_rate)
        require_positive_real("rprop_initial_step", self.rprop_initial_step)
        require_positive_real("rprop_increase", self.rprop_increase)
        require_positive_real("rprop_decrease", self.rprop_decrease)
        require_positive_real("rprop_max_step", self.rprop_max_step)

        if not 0. <= self.momentum < 1.:
            raise ConfigurationError(f"> momentum must lie in [0, 1), got {self.momentum}.")

        if not self.rprop_decrease < 1. < self.rprop_increase:
            raise ConfigurationError("> Rprop needs rprop_decrease < 1 < rprop_increase.")

@dataclass(frozen = True)
class TrainingConfig:
    """
    ## Description:
    Architecture, optimizer, and stopping rules of one training run.
    """

    # (1): Widths of the hidden layers (2 inputs and 1 output are implied):
    hidden_layers: Tuple[int, ...] = _DEFAULT_HIDDEN_LAYERS

    # (2): `lm`, `gd`, `gdm`, or `rprop`:
    algorithm: str = "lm"

    # (3): Damping schedule (used when algorithm == "lm"):
    lm: LmConfig = field(default_factory = LmConfig)

    # (4): First-order settings (used otherwise):
    first_order: Optional[FirstOrderConfig] = None

    # (5): Epoch cap:
    max_epochs: int = _MAXIMUM_EPOCHS

    # (6): Full batches without validation improvement before stopping:
    patience: int = _EARLY_STOPPING_PATIENCE

    # (7): Share of rows used for fitting when the dataset carries no split:
    training_fraction: float = _TRAINING_FRACTION

    # (8): Seed of the weight initialization:
    seed: int = 0

    # (9): Optional wall-clock budget in seconds:
    time_budget: Optional[float] = None

    def __post_init__(self):
        object.__setattr__(self, "hidden_layers", tuple(int(width) for width in self.hidden_layers))

        for width in self.hidden_layers:
            require_positive_integer("hidden_layers", width)

        if self.algorithm not in ALGORITHMS:
            raise ConfigurationError(f"> algorithm must be one of {ALGORITHMS}, got '{self.algorithm}'.")

        if not isinstance(self.lm, LmConfig):
            raise TypeError("> 'lm' must be an LmConfig instance.")

        # (X): Fill in the first-order record so the algorithm name and the record agree:
        if self.algorithm != "lm":
            if self.first_order is None:
                object.__setattr__(self, "first_order", FirstOrderConfig(algorithm = self.algorithm))

            elif self.first_order.algorithm != self.algorithm:
                raise ConfigurationError(
                    f"> algorithm '{self.algorithm}' disagrees with first_order.algorithm '{self.first_order.algorithm}'.")

        require_positive_integer("max_epochs", self.max_epochs)
        require_positive_integer("patience", self.patience)

        if not 0. < self.training_fraction < 1.:
            raise ConfigurationError(f"> training_fraction must lie in (0, 1), got {self.training_fraction}.")

        require_seed("seed", self.seed)

        if self.time_budget is not None:
            require_positive_real("time_budget", self.time_budget)

    def to_dict(self) -> dict:
        """
        A JSON-ready view used in model provenance.
        """
        return asdict(self)
