"""
Rank vectors, the rank normalization chain, and the evaluation statistics
(Kendall tau-b, R^2, MSE).

## Notes:
1. Ranks run the "centrality" way: rank 1 is the *largest* value, and tied
values share the mean of the positions they span.
2. The tau-b implementation counts discordant pairs with a bottom-up merge
sort written over whole numpy arrays, so it is O(n log n) and exact: all the
pair counts are integers, and the final ratio is computed from Python ints.
"""

# Native Library | csv:
import csv

# Native Library | math:
import math

# Native Library | dataclasses:
from dataclasses import dataclass

# Native Library | typing:
from typing import Optional, Sequence, TextIO, Tuple

# 3rd Party Library | NumPy:
import numpy as np

# 3rd Party Library | SciPy:
from scipy import stats

# Self-Import | constants:
from centrank_lib.constants import _Z_VALUE_99

# Self-Import | exceptions:
from centrank_lib.validation import DegenerateFeatureError

EVAL_REPORT_HEADER = ("network", "method", "metric", "tau_b", "r2", "mse", "seconds")

@dataclass(frozen = True)
class RankVector:
    """
    ## Description:
    Per-vertex ranks in [1, n]; their sum is always n(n + 1)/2.
    """

    ranks: np.ndarray

    @property
    def n(self) -> int:
        return int(self.ranks.size)

@dataclass(frozen = True)
class NormalizationStats:
    """
    ## Description:
    Per-feature mean and (population) standard deviation, computed on the
    training rows only and stored with the model.
    """

    mean: np.ndarray
    std: np.ndarray

    def to_dict(self) -> dict:
        return {"mean": [float(value) for value in self.mean], "std": [float(value) for value in self.std]}

    @classmethod
    def from_dict(cls, dictionary: dict) -> "NormalizationStats":
        return cls(
            mean = np.asarray(dictionary["mean"], dtype = np.float64),
            std = np.asarray(dictionary["std"], dtype = np.float64))

@dataclass(frozen = True)
class EvalReport:
    """
    ## Description:
    One row of a comparison: how well `method` ranked `metric` on `network`.
    `wall_time = None` is written as an empty cell.
    """

    network: str
    method: str
    metric: str
    tau_b: float
    r_squared: float
    mse: float
    wall_time: Optional[float] = None

    def __post_init__(self):

        # (1): tau-b in [-1, 1] up to round-off, NaN when undefined:
        if not math.isnan(self.tau_b) and not -1. - 1e-12 <= self.tau_b <= 1. + 1e-12:
            raise ValueError(f"> tau_b must lie in [-1, 1], got {self.tau_b}")

        # (2): An error is never negative:
        if not math.isnan(self.mse) and self.mse < 0.:
            raise ValueError(f"> mse must be >= 0, got {self.mse}")

    def as_row(self) -> list:

        # (X): Missing timing becomes an empty cell:
        seconds = "" if self.wall_time is None else repr(float(self.wall_time))
        return [self.network, self.method, self.metric, repr(float(self.tau_b)), repr(float(self.r_squared)), repr(float(self.mse)), seconds]

def write_eval_reports(reports: Sequence[EvalReport], stream: TextIO) -> None:
    # (1): Header:
    writer = csv.writer(stream, lineterminator = "\n")
    writer.writerow(EVAL_REPORT_HEADER)

    # (2): One line per report:
    for report in reports:
        writer.writerow(report.as_row())

def read_eval_reports(stream: TextIO) -> list:
    """
    ## Description:
    Parse a CSV written by `write_eval_reports`.
    """
    reader = csv.DictReader(stream)

    # (1): If the header is not ours, the file is not a report:
    if tuple(reader.fieldnames or ()) != EVAL_REPORT_HEADER:
        raise ValueError(f"> expected header {','.join(EVAL_REPORT_HEADER)}, got {reader.fieldnames}")

    # (2): An empty seconds cell reads back as None:
    return [
        EvalReport(
            network = row["network"],
            method = row["method"],
            metric = row["metric"],
            tau_b = float(row["tau_b"]),
            r_squared = float(row["r2"]),
            mse = float(row["mse"]),
            wall_time = float(row["seconds"]) if row["seconds"] else None)
        for row in reader]

def rank_transform(values) -> RankVector:
    """
    ## Description:
    Rank 1 is the largest value; ties get the mean of the positions they span.

    ## Examples:
    (5, 3, 3, 1) -> (1, 2.5, 2.5, 4); (7, 7, 7) -> (2, 2, 2).
    """
    values = np.asarray(values, dtype = np.float64)

    # (1): A non-empty vector...
    if values.ndim != 1 or values.size == 0:
        raise ValueError("> rank_transform needs a non-empty 1-D sequence")

    # (2): ... of finite values only:
    if not np.all(np.isfinite(values)):
        raise ValueError("> rank_transform received NaN or infinite values")

    # (3): Negate so the largest value gets rank 1:
    return RankVector(ranks = stats.rankdata(-values, method = "average"))

def scale_ranks(ranks, n: int) -> np.ndarray:
    """
    ## Description:
    Steps 1 and 2 of the chain: r / n, then 2 (r / n) - 1, in (-1, 1].
    """
    ranks = ranks.ranks if isinstance(ranks, RankVector) else np.asarray(ranks, dtype = np.float64)

    # (X): At least one vertex:
    if n < 1:
        raise ValueError(f"> n must be >= 1, got {n}")

    # (X): r / n lies in (0, 1], so the result lies in (-1, 1]:
    return 2. * (ranks / n) - 1.

def unscale_ranks(scaled, n: int) -> np.ndarray:

    # (X): Inverse of `scale_ranks`:
    return (np.asarray(scaled, dtype = np.float64) + 1.) / 2. * n

def fit_stats(features: np.ndarray) -> NormalizationStats:
    """
    ## Description:
    Column means and population standard deviations. A column with zero
    spread cannot be standardized.
    """
    features = np.asarray(features, dtype = np.float64)

    # (X): A 1-D array is one feature column:
    if features.ndim == 1:
        features = features.reshape(-1, 1)

    # (1): Population statistics, ddof = 0:
    mean = features.mean(axis = 0)
    std = features.std(axis = 0)

    # (2): If a column has no spread, it cannot be standardized:
    if np.any(std == 0.) or not np.all(np.isfinite(std)):
        raise DegenerateFeatureError("degenerate feature: standard deviation is zero")

    return NormalizationStats(mean = mean, std = std)

def standardize(features, stats_: Optional[NormalizationStats] = None) -> Tuple[np.ndarray, NormalizationStats]:
    """
    ## Description:
    Step 3 of the chain: subtract the mean and divide by the standard
    deviation. Without stats they are fitted on `features` (training mode);
    given stats are applied as they are (inference mode).
    """
    features = np.asarray(features, dtype = np.float64)

    # (1): Training mode fits, inference mode reuses:
    if stats_ is None:
        stats_ = fit_stats(features)

    # (2): Stored stats get the same check:
    if np.any(stats_.std <= 0.):
        raise DegenerateFeatureError("degenerate feature: standard deviation is zero")

    # (3): z-scores:
    return (features - stats_.mean) / stats_.std, stats_

def denormalize(standardized, stats_: NormalizationStats, n: Optional[int] = None) -> np.ndarray:
    """
    ## Description:
    Invert step 3, and steps 1-2 as well when `n` is given (back to ranks).
    """
    # (1): Undo the standardization:
    scaled = np.asarray(standardized, dtype = np.float64) * stats_.std + stats_.mean

    # (2): Stop in scaled space unless n is known:
    if n is None:
        return scaled

    return unscale_ranks(scaled, n)

def normalize_chain(ranks, n: int, stats_: Optional[NormalizationStats] = None) -> Tuple[np.ndarray, NormalizationStats]:
    """
    ## Description:
    The full chain: r / n, then into (-1, 1], then zero mean and unit
    variance.

    ## Examples:
    Rank 1 with n = 100 is -0.98 before standardization; rank n is +1.
    """
    return standardize(scale_ranks(ranks, n), stats_)

def _dense_codes(sorted_values: np.ndarray) -> np.ndarray:
    """
    Consecutive integer codes of an already sorted array (equal values share a code).
    """
    # (X): A new code wherever the value changes:
    change = np.empty(sorted_values.size, dtype = bool)
    change[0] = True
    np.not_equal(sorted_values[1:], sorted_values[:-1], out = change[1:])
    return np.cumsum(change) - 1

def _tied_pairs(codes: np.ndarray) -> int:
    # (X): C(count, 2) pairs per group:
    counts = np.bincount(codes).astype(np.int64)
    return int((counts * (counts - 1) // 2).sum())

def count_inversions(values: np.ndarray) -> int:
    """
    ## Description:
    The number of pairs i < j with values[i] > values[j] (equal values are
    not an inversion), by a bottom-up merge sort over whole arrays.
    """
    values = np.asarray(values, dtype = np.int64).copy()
    size = values.size

    # (X): Nothing to invert:
    if size < 2:
        return 0

    # (1): Shift values so that block keys of neighboring blocks never overlap:
    values -= values.min()
    span = int(values.max()) + 1

    inversions = 0
    width = 1
    positions = np.arange(size)

    while width < size:

        # (2): Pair runs [2kw, (2k+1)w) (left) with [(2k+1)w, (2k+2)w) (right):
        pair_index = positions // (2 * width)
        is_left = (positions // width) % 2 == 0

        keys = values + pair_index * span

        # (3): For every right element, count the left elements in its pair that are larger:
        left_keys = keys[is_left]
        right_keys = keys[~is_left]
        right_pairs = pair_index[~is_left]

        pair_left_end = np.minimum((right_pairs * 2 + 1) * width, size)
        pair_left_end_in_left = np.searchsorted(np.flatnonzero(is_left), pair_left_end)
        not_greater = np.searchsorted(left_keys, right_keys, side = "right")

        inversions += int((pair_left_end_in_left - not_greater).sum())

        # (4): Merge each pair (stable, so equal values keep their order):
        order = np.argsort(keys, kind = "stable")
        values = values[order]

        width *= 2

    return inversions

def _tau_counts(x: np.ndarray, y: np.ndarray) -> Tuple[int, int, int, int]:
    """
    ## Description:
    (concordant - discordant, total pairs, pairs tied in x, pairs tied in y),
    with pairs tied in both counted in both tie terms.
    """
    size = x.size

    # (1): Sort by y, then stably by x; dense codes make ties exact:
    by_y = np.argsort(y, kind = "mergesort")
    x_codes = x[by_y]
    y_codes = _dense_codes(y[by_y])

    by_x = np.argsort(x_codes, kind = "mergesort")
    x_codes = _dense_codes(x_codes[by_x])
    y_codes = y_codes[by_x]

    # (2): Inversions of y in x-order (y ascending within tied x) are the discordant pairs:
    discordant = count_inversions(y_codes)

    # (3): Pairs tied in x, in y, and in both:
    x_ties = _tied_pairs(x_codes)
    y_ties = _tied_pairs(np.sort(y_codes))

    joint_change = np.empty(size, dtype = bool)
    joint_change[0] = True
    joint_change[1:] = (x_codes[1:] != x_codes[:-1]) | (y_codes[1:] != y_codes[:-1])
    joint_ties = _tied_pairs(np.cumsum(joint_change) - 1)

    # (4): C = total - Tx - Ty + Txy - D:
    total = size * (size - 1) // 2
    concordant_minus_discordant = total - x_ties - y_ties + joint_ties - 2 * discordant

    return concordant_minus_discordant, total, x_ties, y_ties

def kendall_tau_b(x, y) -> float:
    """
    ## Description:
    Kendall tau-b: (C - D) / sqrt((C + D + Tx)(C + D + Ty)), Tx and Ty the
    pairs tied only in x or only in y; pairs tied in both drop out.

    ## Examples:
    x = (1, 2, 3, 4), y = (1, 3, 2, 4) -> 2/3.
    """
    x = np.asarray(x, dtype = np.float64)
    y = np.asarray(y, dtype = np.float64)

    # (1): Two aligned vectors...
    if x.shape != y.shape or x.ndim != 1:
        raise ValueError(f"> tau-b needs two 1-D sequences of equal length, got {x.shape} and {y.shape}")

    # (2): ... with at least one pair...
    if x.size < 2:
        raise ValueError("> tau-b needs at least two observations")

    # (3): ... and no NaN:
    if np.any(np.isnan(x)) or np.any(np.isnan(y)):
        raise ValueError("> tau-b received NaN values")

    # (X): Exact integer counts, O(n log n):
    concordant_minus_discordant, total, x_ties, y_ties = _tau_counts(x, y)

    denominator = (total - x_ties) * (total - y_ties)

    # (X): A constant sequence has no ordering to compare:
    if denominator == 0:
        raise ValueError("tau undefined")

    return concordant_minus_discordant / math.sqrt(denominator)

def r_squared(prediction, target) -> float:
    """
    ## Description:
    1 - SS_res / SS_tot, SS_tot about the mean of the target.

    ## Examples:
    Targets (0, 1, 2) predicted with an offset of 1 -> -0.5.
    """
    prediction = np.asarray(prediction, dtype = np.float64)
    target = np.asarray(target, dtype = np.float64)

    # (X): Two aligned vectors with a spread to explain:
    if prediction.shape != target.shape or target.size < 2:
        raise ValueError("> r_squared needs two sequences of equal length >= 2")

    # (1): Spread of the target about its mean:
    total = float(np.sum(np.square(target - target.mean())))

    if total == 0.:
        raise ValueError("> r_squared undefined for a constant target")

    # (2): Residual share:
    return 1. - float(np.sum(np.square(target - prediction))) / total

def mean_squared_error(prediction, target) -> float:
    prediction = np.asarray(prediction, dtype = np.float64)
    target = np.asarray(target, dtype = np.float64)

    # (1): Two aligned, non-empty vectors:
    if prediction.shape != target.shape or target.size == 0:
        raise ValueError("> mean_squared_error needs two non-empty sequences of equal length")

    # (2): Mean of the squared residuals:
    return float(np.mean(np.square(prediction - target)))

def confidence_interval(values, z: float = _Z_VALUE_99) -> Tuple[float, float]:
    """
    ## Description:
    (mean, half width) of a normal interval: z * sample std / sqrt(count).
    A single value has a zero-width interval.
    """
    values = np.asarray(values, dtype = np.float64)
    # (1): Undefined folds or runs are left out:
    values = values[~np.isnan(values)]

    # (1.1): Nothing left, nothing to say:
    if values.size == 0:
        return float("nan"), float("nan")

    # (1.2): One value has no spread:
    if values.size == 1:
        return float(values[0]), 0.

    # (2): Sample standard deviation:
    return float(values.mean()), float(z * values.std(ddof = 1) / math.sqrt(values.size))
