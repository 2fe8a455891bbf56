"""
Basic validation functions for the `centrank` library, plus the exception
types they raise.

## Notes:
1. Every exception here derives from `ValueError`, so callers that only care
about "bad data" can catch that one type. The CLI maps all of them to exit
code 2.
"""

# Native Library | math:
import math

# 3rd Party Library | NumPy:
import numpy as np

class ConfigurationError(ValueError):
    """
    A configuration record holds a value outside its admissible range.
    """

class EdgeListParseError(ValueError):
    """
    ## Description:
    A line of an edge-list stream could not be parsed. The offending
    (1-based) line number is kept on the exception.
    """

    def __init__(self, message: str, line_number: int):
        super().__init__(f"line {line_number}: {message}")
        self.line_number = line_number

class GraphNotConnectedError(ValueError):
    """
    An algorithm that needs a connected graph received a disconnected one.
    """

class DegenerateFeatureError(ValueError):
    """
    A feature column has zero standard deviation and cannot be standardized.
    """

class SchemaMismatchError(ValueError):
    """
    A model, dataset, or graph does not match what the consumer expects.
    """

def require_positive_integer(name: str, value) -> int:
    """
    ## Description:
    Refuse booleans, non-integers, and integers below one.
    """
    # (X): bool is an int subclass, so it is refused by name:
    if isinstance(value, bool) or not isinstance(value, (int, np.integer)) or value < 1:
        raise ConfigurationError(f"> '{name}' must be a positive integer, got {value!r}")

    return int(value)

def require_non_negative_integer(name: str, value) -> int:
    if isinstance(value, bool) or not isinstance(value, (int, np.integer)) or value < 0:
        raise ConfigurationError(f"> '{name}' must be a non-negative integer, got {value!r}")

    return int(value)

def require_positive_real(name: str, value) -> float:
    """
    ## Description:
    Refuse anything that is not a finite real number strictly above zero.
    """
    # (1): A real number...
    if isinstance(value, bool) or not isinstance(value, (int, float, np.integer, np.floating)):
        raise ConfigurationError(f"> '{name}' must be a real number, got {value!r}")

    # (2): ... finite and positive:
    if not math.isfinite(value) or value <= 0.:
        raise ConfigurationError(f"> '{name}' must be finite and > 0, got {value!r}")

    return float(value)

def require_interval(name: str, value, lower: float, upper: float, open_lower: bool = False) -> float:
    """
    ## Description:
    Refuse values outside [lower, upper] (or (lower, upper] when `open_lower`).
    """
    # (1): A finite real number...
    if isinstance(value, bool) or not isinstance(value, (int, float, np.integer, np.floating)):
        raise ConfigurationError(f"> '{name}' must be a real number, got {value!r}")

    if not math.isfinite(value):
        raise ConfigurationError(f"> '{name}' must be finite, got {value!r}")

    # (2): ... inside the interval:
    below = value <= lower if open_lower else value < lower

    if below or value > upper:
        bracket = "(" if open_lower else "["
        raise ConfigurationError(f"> '{name}' must lie in {bracket}{lower}, {upper}], got {value!r}")

    return float(value)

def require_seed(name: str, value) -> int:
    """
    ## Description:
    Seeds are unsigned 64-bit integers.
    """
    # (X): Any integer in [0, 2^64):
    if isinstance(value, bool) or not isinstance(value, (int, np.integer)) or not 0 <= value < 2**64:
        raise ConfigurationError(f"> '{name}' must be an integer in [0, 2^64), got {value!r}")

    return int(value)

def require_finite_array(name: str, values) -> np.ndarray:
    """
    ## Description:
    Convert to a float64 array and refuse NaN or infinite entries.
    """
    array = np.asarray(values, dtype = np.float64)

    # (X): No NaN, no infinity:
    if not np.all(np.isfinite(array)):
        raise ValueError(f"> '{name}' contains NaN or infinite values")

    return array

def validate_graph(graph) -> None:
    """
    ## Description:
    Check every structural invariant of a `Graph`: offsets non-decreasing and
    ending at 2m, neighbor ids in range, no self-loops, no duplicate pairs,
    sorted neighbor lists, and symmetric adjacency.

    :param Graph graph:
        The graph to check. Nothing is returned; a `ValueError` is raised on
        the first violation.
    """

    offsets = graph.offsets
    neighbors = graph.neighbors

    # (1): Shape checks:
    if offsets.shape != (graph.n + 1,):
        raise ValueError(f"> offsets must have n + 1 = {graph.n + 1} entries, got {offsets.shape}")

    if offsets[0] != 0 or offsets[-1] != 2 * graph.m or neighbors.shape != (2 * graph.m,):
        raise ValueError("> offsets[n] must equal 2m and match the neighbor array length")

    if np.any(np.diff(offsets) < 0):
        raise ValueError("> offsets must be non-decreasing")

    # (1.1): Nothing else to check without edges:
    if graph.m == 0:
        return

    # (2): Range checks:
    if neighbors.min() < 0 or neighbors.max() >= graph.n:
        raise ValueError("> neighbor id out of range [0, n)")

    sources = np.repeat(np.arange(graph.n), np.diff(offsets))

    # (3): Self-loops:
    if np.any(sources == neighbors):
        raise ValueError("> self-loop found")

    # (4): Sorted, duplicate-free lists: strictly increasing within each row.
    same_row = sources[1:] == sources[:-1]
    if np.any(same_row & (neighbors[1:] <= neighbors[:-1])):
        raise ValueError("> neighbor lists must be strictly increasing (sorted, no duplicates)")

    # (5): Symmetry: the multiset of (u, v) equals the multiset of (v, u).
    forward = sources.astype(np.int64) * graph.n + neighbors
    backward = neighbors.astype(np.int64) * graph.n + sources

    if not np.array_equal(np.sort(forward), np.sort(backward)):
        raise ValueError("> adjacency is not symmetric")

def validate_configuration(
        configuration_dictionary: dict,
        verbose: bool = False) -> dict:
    """
    ## Description:
    Validate the user's dict of pipeline parameters.

    :param dict configuration_dictionary:
        Must hold `corpus` (a `CorpusSpec`) and `training` (a
        `TrainingConfig`); may hold `compare` (a `CompareConfig`) and
        `workers` (a positive integer).

    :param bool verbose:
        Do you want to see all output of this function evaluation?
    """

    # (X): Imported here: the records import this module for their own checks.
    from centrank_lib.inputs import CorpusSpec, CompareConfig
    from centrank_lib.training_inputs import TrainingConfig

    # (1): A dictionary...
    if not isinstance(configuration_dictionary, dict):
        raise TypeError("> configuration must be a dict")

    # (2): ... holding the two required keys...
    required_keys = [
        "corpus",
        "training",
        ]

    if verbose:
        print("> [VERBOSE]: Now iterating over required keys...")

    for key in required_keys:
        if key not in configuration_dictionary:
            raise ValueError(f"Missing required key in config: {key}")

    # (3): ... each with the right record type:
    if not isinstance(configuration_dictionary["corpus"], CorpusSpec):
        raise TypeError("> 'corpus' key must be a CorpusSpec instance.")

    if not isinstance(configuration_dictionary["training"], TrainingConfig):
        raise TypeError("> 'training' key must be a TrainingConfig instance.")

    if verbose:
        print("> [VERBOSE]: Extracted corpus and training settings from configuration dictionary.")

    # (4): Optional keys:
    compare_settings = configuration_dictionary.get("compare")

    if compare_settings is not None and not isinstance(compare_settings, CompareConfig):
        raise TypeError("> 'compare' key must be a CompareConfig instance.")

    if configuration_dictionary.get("workers") is not None:
        require_positive_integer("workers", configuration_dictionary["workers"])

    # (5): Hand the dictionary back unchanged:
    return configuration_dictionary
