"""
Entry point for the configuration dataclasses of the generator, the sampling
approximators, and the comparison runs.
"""

# (1): Import the specialized `dataclass` library:
from dataclasses import dataclass, field

# (2): Native Library | typing:
from typing import Optional, Tuple

# 3rd Party Library | NumPy:
import numpy as np

# (3): Self-Import | validation helpers:
from centrank_lib.validation import (
    ConfigurationError,
    require_interval,
    require_positive_integer,
    require_positive_real,
    require_seed)

# (4): Self-Import | defaults:
from centrank_lib.constants import (
    _CLUSTERING_TARGET_RANGE,
    _HEAVY_TAILED_EXPONENTS,
    _LOGNORMAL_SHAPES,
    _SAMPLE_FRACTIONS,
    _SAMPLE_TRIALS)

HEAVY_TAILED = "heavy_tailed"
LOGNORMAL = "lognormal"

# (X): Short spellings accepted on the command line:
_FAMILY_ALIASES = {
    "heavy": HEAVY_TAILED,
    "heavy_tailed": HEAVY_TAILED,
    "heavy-tailed": HEAVY_TAILED,
    "lognormal": LOGNORMAL,
    "log-normal": LOGNORMAL,
}

BLOCK_RULES = ("calibrated", "uniform", "cube_root")

@dataclass(frozen = True)
class SampleConfig:
    """
    ## Description:
    Parameters of one uniform source-sampling run: the fraction of vertices
    used as sources, the seed of the generator, and how many independent
    trials to run.
    """

    # (1): Share of the vertices used as BFS sources, in (0, 1]:
    fraction: float

    # (2): Seed of the PCG64 generator:
    seed: int = 0

    # (3): Independent trials:
    trials: int = _SAMPLE_TRIALS

    def __post_init__(self):
        require_interval("fraction", self.fraction, 0., 1., open_lower = True)
        require_seed("seed", self.seed)
        require_positive_integer("trials", self.trials)

    def sample_size(self, vertex_count: int) -> int:
        """
        ## Description:
        max(1, ceil(fraction * n)), never above n.
        """
        # (1): Guard the float product so that e.g. 0.07 * 100 stays 7:
        size = int(np.ceil(np.round(self.fraction * vertex_count, 9)))

        # (2): At least one source, never more than the graph has:
        return min(vertex_count, max(1, size))

@dataclass(frozen = True)
class DegreeDistributionSpec:
    """
    ## Description:
    One degree-distribution family of the training corpus. The heavy-tailed
    family weighs degree k by k^(-exponent); the lognormal family by
    exp(-(ln k)^2 / shape). Only the parameter of the chosen family applies.

    ## Notes:
    `k_max = None` means "n - 1 of whatever network this spec is used for".
    """

    # (1): `heavy_tailed` or `lognormal`:
    family: str

    # (2): The heavy-tailed exponent (lambda):
    exponent: Optional[float] = None

    # (3): The lognormal shape (S):
    shape: Optional[float] = None

    # (4): Smallest degree with non-zero weight:
    k_min: int = 1

    # (5): Largest degree with non-zero weight:
    k_max: Optional[int] = None

    def __post_init__(self):

        # (X): Frozen dataclass: normalize the family spelling through object.__setattr__:
        family = _FAMILY_ALIASES.get(str(self.family).lower())

        if family is None:
            raise ConfigurationError(f"> Unknown degree family '{self.family}'; use 'heavy_tailed' or 'lognormal'.")

        object.__setattr__(self, "family", family)

        # (X): Exactly one parameter applies per family:
        if family == HEAVY_TAILED:
            if self.exponent is None or self.shape is not None:
                raise ConfigurationError("> The heavy-tailed family takes 'exponent' (lambda) and no 'shape'.")
            require_positive_real("exponent", self.exponent)

        else:
            if self.shape is None or self.exponent is not None:
                raise ConfigurationError("> The lognormal family takes 'shape' (S) and no 'exponent'.")
            require_positive_real("shape", self.shape)

        require_positive_integer("k_min", self.k_min)

        if self.k_max is not None:
            require_positive_integer("k_max", self.k_max)

            if self.k_max < self.k_min:
                raise ConfigurationError(f"> k_max ({self.k_max}) must be >= k_min ({self.k_min}).")

    @property
    def parameter(self) -> float:
        """
        The value of whichever parameter applies.
        """
        return float(self.exponent if self.family == HEAVY_TAILED else self.shape)

    def weights(self, degrees: np.ndarray) -> np.ndarray:
        """
        ## Description:
        Un-normalized weights of the given integer degrees.
        """
        degrees = np.asarray(degrees, dtype = np.float64)

        if self.family == HEAVY_TAILED:
            return np.power(degrees, -self.exponent)

        return np.exp(-np.square(np.log(degrees)) / self.shape)

    def resolved_k_max(self, vertex_count: int) -> int:
        """
        ## Description:
        The effective upper degree bound for a network of `vertex_count` vertices.
        """
        if self.k_max is None:
            return vertex_count - 1

        if self.k_max > vertex_count - 1:
            raise ConfigurationError(f"> k_max ({self.k_max}) must be <= n - 1 ({vertex_count - 1}).")

        return self.k_max

    def label(self) -> str:
        """
        A short identifier such as `heavy_tailed-2` used in file names.
        """
        return f"{self.family}-{self.parameter:g}"

@dataclass(frozen = True)
class BterConfig:
    """
    ## Description:
    Everything the BTER generator needs for one network.

    ## Notes:
    The generator accepts any clustering target in [0, 1]; the training
    corpus draws its targets from [0.3, 0.7] (see `CorpusSpec`).
    """

    # (1): Exact vertex count of the generated network:
    n: int

    # (2): Degree distribution:
    distribution: DegreeDistributionSpec

    # (3): Target global clustering coefficient of the network:
    clustering_target: float

    # (4): Seed of the PCG64 generator:
    seed: int = 0

    # (5): How the within-block probability follows from the target, see `block_probability`:
    block_rule: str = "calibrated"

    def __post_init__(self):
        require_positive_integer("n", self.n)

        if self.n < 2:
            raise ConfigurationError(f"> A BTER network needs n >= 2, got {self.n}.")

        if not isinstance(self.distribution, DegreeDistributionSpec):
            raise TypeError("> 'distribution' must be a DegreeDistributionSpec instance.")

        require_interval("clustering_target", self.clustering_target, 0., 1.)
        require_seed("seed", self.seed)

        if self.block_rule not in BLOCK_RULES:
            raise ConfigurationError(f"> block_rule must be one of {BLOCK_RULES}, got '{self.block_rule}'.")

        # (X): Fail early if the degree bounds do not fit this network:
        k_max = self.distribution.resolved_k_max(self.n)

        if self.distribution.k_min > k_max:
            raise ConfigurationError(f"> k_min ({self.distribution.k_min}) exceeds n - 1 ({self.n - 1}).")

    @property
    def block_probability(self) -> Optional[float]:
        """
        ## Description:
        The fixed probability used for every pair inside an affinity block, or
        `None` under the "calibrated" rule: the generator then solves for it
        once the blocks are packed (see `bter.calibrated_block_probability`).
        """
        if self.block_rule == "calibrated":
            return None

        if self.block_rule == "cube_root":
            return float(self.clustering_target ** (1. / 3.))

        return float(self.clustering_target)

def _standard_distributions() -> Tuple[DegreeDistributionSpec, ...]:
    heavy = tuple(DegreeDistributionSpec(HEAVY_TAILED, exponent = value) for value in _HEAVY_TAILED_EXPONENTS)
    lognormal = tuple(DegreeDistributionSpec(LOGNORMAL, shape = value) for value in _LOGNORMAL_SHAPES)
    return heavy + lognormal

@dataclass(frozen = True)
class CorpusSpec:
    """
    ## Description:
    Shape of a synthetic training corpus: every distribution is generated at
    every size, `networks_per_size` times, each network with its own seed and
    its own clustering target drawn uniformly from `clustering_range`.
    """

    # (1): The degree distributions (six families by default):
    distributions: Tuple[DegreeDistributionSpec, ...] = field(default_factory = _standard_distributions)

    # (2): Network sizes:
    sizes: Tuple[int, ...] = (100, 200, 300, 400, 500)

    # (3): Networks per (distribution, size):
    networks_per_size: int = 4

    # (4): Interval of the per-network clustering target:
    clustering_range: Tuple[float, float] = _CLUSTERING_TARGET_RANGE

    # (5): Master seed; per-network seeds derive from (master seed, network index):
    master_seed: int = 0

    # (6): Block probability rule forwarded to every `BterConfig`:
    block_rule: str = "calibrated"

    def __post_init__(self):
        object.__setattr__(self, "distributions", tuple(self.distributions))
        object.__setattr__(self, "sizes", tuple(int(size) for size in self.sizes))
        object.__setattr__(self, "clustering_range", tuple(float(value) for value in self.clustering_range))

        if not self.distributions or not all(isinstance(spec, DegreeDistributionSpec) for spec in self.distributions):
            raise ConfigurationError("> 'distributions' must be a non-empty sequence of DegreeDistributionSpec.")

        if not self.sizes:
            raise ConfigurationError("> 'sizes' must not be empty.")

        for size in self.sizes:
            if size < 2:
                raise ConfigurationError(f"> corpus sizes must be >= 2, got {size}.")

        require_positive_integer("networks_per_size", self.networks_per_size)

        lower, upper = self.clustering_range
        require_interval("clustering_range[0]", lower, 0., 1.)
        require_interval("clustering_range[1]", upper, 0., 1.)

        if lower > upper:
            raise ConfigurationError(f"> clustering_range must be ordered, got {self.clustering_range}.")

        require_seed("master_seed", self.master_seed)

        if self.block_rule not in BLOCK_RULES:
            raise ConfigurationError(f"> block_rule must be one of {BLOCK_RULES}, got '{self.block_rule}'.")

    @classmethod
    def full(cls, master_seed: int = 0) -> "CorpusSpec":
        """
        ## Description:
        Six distributions x sizes {100, ..., 1000} x 10 networks: 600 networks,
        330,000 vertices.
        """
        return cls(
            sizes = tuple(range(100, 1001, 100)),
            networks_per_size = 10,
            master_seed = master_seed)

    @classmethod
    def desk(cls, master_seed: int = 0) -> "CorpusSpec":
        """
        ## Description:
        Six distributions x sizes {100, ..., 500} x 4 networks: 120 networks.
        """
        return cls(
            sizes = (100, 200, 300, 400, 500),
            networks_per_size = 4,
            master_seed = master_seed)

    @property
    def network_count(self) -> int:
        return len(self.distributions) * len(self.sizes) * self.networks_per_size

    @property
    def vertex_count(self) -> int:
        return len(self.distributions) * sum(self.sizes) * self.networks_per_size

@dataclass(frozen = True)
class CompareConfig:
    """
    ## Description:
    Settings of one exact/sampling/model comparison on a single network.
    """

    # (1): Sampling fractions:
    fractions: Tuple[float, ...] = _SAMPLE_FRACTIONS

    # (2): Trials (distinct seeds) per fraction:
    trials: int = _SAMPLE_TRIALS

    # (3): Master seed of the sampling trials:
    seed: int = 0

    # (4): Workers for the exact and sampled Brandes passes:
    workers: Optional[int] = None

    # (5): Write empty timing cells so reports are byte-reproducible:
    omit_timing: bool = False

    def __post_init__(self):
        object.__setattr__(self, "fractions", tuple(float(value) for value in self.fractions))

        for fraction in self.fractions:
            require_interval("fractions", fraction, 0., 1., open_lower = True)

        require_positive_integer("trials", self.trials)
        require_seed("seed", self.seed)

        if self.workers is not None:
            require_positive_integer("workers", self.workers)
