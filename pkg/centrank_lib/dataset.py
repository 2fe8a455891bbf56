"""
Entry point for the training `Dataset`: one row per vertex of every corpus
LCC, holding the normalized degree and eigenvector ranks (inputs) and the
normalized exact rank of the target metric (label).

## Description:
The file format is a CSV with the header
`network,vertex,degree_input,eigenvector_input,label,split` next to a JSON
sidecar (same stem, `.json`) holding the normalization stats, the target
metric, the split seed, and the SHA-256 of the corpus manifest the rows came
from. Values in the CSV are scaled ranks (steps 1-2 of the chain);
standardization with the stored stats happens when the rows are used.
"""

# Native Library | csv:
import csv

# Native Library | hashlib:
import hashlib

# Native Library | json:
import json

# Native Library | dataclasses:
from dataclasses import dataclass, replace

# Native Library | pathlib:
from pathlib import Path

# Native Library | typing:
from typing import Optional, Tuple

# 3rd Party Library | NumPy:
import numpy as np

# Self-Import | the worker backend:
from centrank_lib import backend

# Self-Import | manifest reading:
from centrank_lib.bter import MANIFEST_FILE_NAME, read_manifest

# Self-Import | centralities:
from centrank_lib.centrality import betweenness_closeness, degree_centrality, eigenvector_centrality

# Self-Import | graph helpers:
from centrank_lib.graph import Graph, largest_connected_component

# Self-Import | rank machinery:
from centrank_lib.ranking import NormalizationStats, fit_stats, rank_transform, scale_ranks, standardize

# Self-Import | exceptions and checks:
from centrank_lib.validation import ConfigurationError, SchemaMismatchError, require_interval, require_seed

DATASET_HEADER = ("network", "vertex", "degree_input", "eigenvector_input", "label", "split")

TARGET_METRICS = ("betweenness", "closeness")

_TRAINING_SPLIT = "train"
_VALIDATION_SPLIT = "validation"

@dataclass(frozen = True, eq = False)
class Dataset:
    """
    Welcome to the `Dataset` class!

    ## Description:
    Rows of scaled ranks plus their provenance and split. `input_stats` and
    `output_stats` are always fitted on the training rows only.
    """

    network: np.ndarray
    vertex: np.ndarray
    inputs: np.ndarray
    labels: np.ndarray
    is_training: np.ndarray
    target_metric: str
    seed: int
    manifest_sha256: str
    input_stats: NormalizationStats
    output_stats: NormalizationStats

    @classmethod
    def from_rows(
            cls,
            network: np.ndarray,
            vertex: np.ndarray,
            inputs: np.ndarray,
            labels: np.ndarray,
            is_training: np.ndarray,
            target_metric: str,
            seed: int = 0,
            manifest_sha256: str = "") -> "Dataset":
        """
        ## Description:
        Assemble a dataset and fit its stats on the training rows.
        """
        # (1): Two inputs and one label per row:
        inputs = np.asarray(inputs, dtype = np.float64).reshape(-1, 2)
        labels = np.asarray(labels, dtype = np.float64).reshape(-1)
        is_training = np.asarray(is_training, dtype = bool).reshape(-1)

        # (1.1): If the target is unknown, refuse it:
        if target_metric not in TARGET_METRICS:
            raise ConfigurationError(f"> target must be one of {TARGET_METRICS}, got '{target_metric}'")

        # (2): Columns of one length, finite values, a non-empty training split:
        if not (inputs.shape[0] == labels.size == is_training.size == len(network) == len(vertex)):
            raise SchemaMismatchError("> dataset columns have different lengths")

        if not (np.all(np.isfinite(inputs)) and np.all(np.isfinite(labels))):
            raise ValueError("> dataset rows must be finite")

        # (2.1): Stats need at least one training row:
        if not np.any(is_training):
            raise ConfigurationError("> the training split is empty")

        # (3): Stats come from the training rows only:
        return cls(
            network = np.asarray(network),
            vertex = np.asarray(vertex, dtype = np.int64),
            inputs = inputs,
            labels = labels,
            is_training = is_training,
            target_metric = target_metric,
            seed = seed,
            manifest_sha256 = manifest_sha256,
            input_stats = fit_stats(inputs[is_training]),
            output_stats = fit_stats(labels[is_training]))

    @property
    def size(self) -> int:

        # (X): One label per row:
        return int(self.labels.size)

    def standardized_inputs(self) -> np.ndarray:

        # (X): z-scores with the training stats:
        return standardize(self.inputs, self.input_stats)[0]

    def standardized_labels(self) -> np.ndarray:

        # (X): Labels as a one-column matrix, then back to a vector:
        return standardize(self.labels.reshape(-1, 1), self.output_stats)[0][:, 0]

    def split(self) -> Tuple[np.ndarray, np.ndarray, np.ndarray, np.ndarray]:
        """
        (training inputs, training labels, validation inputs, validation
        labels), all standardized.
        """
        # (1): Standardize every row with the training stats:
        inputs = self.standardized_inputs()
        labels = self.standardized_labels()

        # (2): Then split:
        mask = self.is_training

        return inputs[mask], labels[mask], inputs[~mask], labels[~mask]

    def with_split(self, is_training: np.ndarray) -> "Dataset":
        """
        The same rows under another split, stats refitted.
        """
        # (X): `from_rows` refits the stats:
        return Dataset.from_rows(
            self.network, self.vertex, self.inputs, self.labels, is_training,
            self.target_metric, self.seed, self.manifest_sha256)

    def subset(self, rows: np.ndarray) -> "Dataset":
        """
        The given rows, split and stats kept.
        """
        # (X): Stats are carried over, not refitted:
        return replace(
            self,
            network = self.network[rows],
            vertex = self.vertex[rows],
            inputs = self.inputs[rows],
            labels = self.labels[rows],
            is_training = self.is_training[rows])

def vertex_features(graph: Graph, verbose: bool = False) -> np.ndarray:
    """
    ## Description:
    The two network inputs of every vertex: its degree rank and its
    eigenvector rank, each scaled into (-1, 1] by the graph size.
    """
    # (1): Average ranks, rank 1 the most central:
    degree_ranks = rank_transform(degree_centrality(graph).values)
    eigenvector_ranks = rank_transform(eigenvector_centrality(graph, verbose = verbose).values)

    # (2): r / n, then 2 (r / n) - 1:
    return np.column_stack([scale_ranks(degree_ranks, graph.n), scale_ranks(eigenvector_ranks, graph.n)])

def network_rows(graph: Graph, target_metric: str) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
    """
    ## Description:
    (external vertex ids, inputs, labels) of one connected graph.
    """
    # (1): One Brandes pass gives both metrics; the network is already one task:
    betweenness, closeness = betweenness_closeness(graph, workers = 1)

    # (1.1): Keep the one we label with:
    target = betweenness if target_metric == "betweenness" else closeness

    # (2): Label on the same scale as the inputs:
    return (
        graph.external_ids(),
        vertex_features(graph),
        scale_ranks(rank_transform(target.values), graph.n))

def _rows_of_entry(target_metric: str, entry) -> Tuple[str, np.ndarray, np.ndarray, np.ndarray]:
    # (X): If the manifest points at a missing file, stop here:
    if not Path(entry.edge_list).exists():
        raise FileNotFoundError(f"> corpus file missing: {entry.edge_list}")

    # (X): Centralities are defined on the LCC only:
    graph = largest_connected_component(entry.load())
    vertex, inputs, labels = network_rows(graph, target_metric)

    # (X): The file stem names the network in the rows:
    return Path(entry.edge_list).stem, vertex, inputs, labels

def manifest_digest(path) -> str:
    path = Path(path)

    # (X): A corpus directory stands for its manifest:
    if path.is_dir():
        path = path / MANIFEST_FILE_NAME

    # (X): Digest of the manifest bytes:
    return hashlib.sha256(path.read_bytes()).hexdigest()

def make_dataset(
        manifest,
        target_metric: str,
        validation_fraction: float = 0.15,
        seed: int = 0,
        workers: Optional[int] = None,
        verbose: bool = False) -> Dataset:
    """
    ## Description:
    Build the rows of every corpus network (LCC only) and draw the split.

    ## Detailed Description:
    Networks are processed on the workers, one network per task, and
    concatenated in manifest order. Each row lands in the validation split
    with probability `validation_fraction`, drawn from a PCG64 generator
    seeded with `seed`; the stats are then fitted on the training rows.

    :param manifest:
        Path of a corpus manifest (or of its directory).

    :param str target_metric:
        `betweenness` or `closeness`.
    """
    # (1): Arguments:
    if target_metric not in TARGET_METRICS:
        raise ConfigurationError(f"> target must be one of {TARGET_METRICS}, got '{target_metric}'")

    # (1.1): Fraction and seed in range:
    require_interval("validation_fraction", validation_fraction, 0., 1.)
    require_seed("seed", seed)

    # (2): Networks listed by the manifest:
    entries = read_manifest(manifest)

    # (2.1): An empty manifest gives no rows:
    if not entries:
        raise ValueError(f"> manifest {manifest} lists no networks")

    # (2.2): If the user wants to know the scale of the job...
    if verbose:
        print(f"> [VERBOSE]: Building {target_metric} rows from {len(entries)} networks.")

    # (3): One task per network:
    parts = backend.parallel_map(_rows_of_entry, target_metric, entries, workers = workers)

    # (4): Concatenate in manifest order:
    network = np.concatenate([np.full(part[1].size, part[0], dtype = object) for part in parts])
    vertex = np.concatenate([part[1] for part in parts])
    inputs = np.concatenate([part[2] for part in parts])
    labels = np.concatenate([part[3] for part in parts])

    # (5): Independent Bernoulli split per row:
    rng = np.random.Generator(np.random.PCG64(seed))
    is_training = rng.random(labels.size) >= validation_fraction

    # (5.1): ... and the split sizes:
    if verbose:
        print(f"> [VERBOSE]: {labels.size} rows, {int(is_training.sum())} for training.")

    # (6): Assemble and fit the stats:
    return Dataset.from_rows(
        network, vertex, inputs, labels, is_training,
        target_metric = target_metric,
        seed = seed,
        manifest_sha256 = manifest_digest(manifest))

def sidecar_path(path) -> Path:

    # (X): rows.csv -> rows.json:
    return Path(path).with_suffix(".json")

def save_dataset(dataset: Dataset, path) -> None:
    """
    ## Description:
    Write the rows CSV and its JSON sidecar. Identical datasets give
    identical bytes.
    """
    path = Path(path)

    # (1): Rows; floats written with repr so they read back exactly:
    with open(path, "w", encoding = "utf-8", newline = "") as stream:
        writer = csv.writer(stream, lineterminator = "\n")
        writer.writerow(DATASET_HEADER)

        # (1.1): One line per row, split by name:
        for row in range(dataset.size):
            writer.writerow([
                dataset.network[row],
                int(dataset.vertex[row]),
                repr(float(dataset.inputs[row, 0])),
                repr(float(dataset.inputs[row, 1])),
                repr(float(dataset.labels[row])),
                _TRAINING_SPLIT if dataset.is_training[row] else _VALIDATION_SPLIT])

    # (2): Sidecar with the stats and the provenance:
    sidecar = {
        "target_metric": dataset.target_metric,
        "seed": dataset.seed,
        "manifest_sha256": dataset.manifest_sha256,
        "rows": dataset.size,
        "input_stats": dataset.input_stats.to_dict(),
        "output_stats": dataset.output_stats.to_dict(),
    }

    # (3): Sorted keys for identical bytes:
    with open(sidecar_path(path), "w", encoding = "utf-8", newline = "\n") as stream:
        stream.write(json.dumps(sidecar, sort_keys = True, indent = 2) + "\n")

def load_dataset(path) -> Dataset:
    """
    ## Description:
    Read a dataset written by `save_dataset`. The stored stats are checked
    against the rows so a hand-edited file cannot slip through.
    """
    path = Path(path)

    # (1): Sidecar first:
    try:
        with open(sidecar_path(path), "r", encoding = "utf-8") as stream:
            sidecar = json.load(stream)

    except FileNotFoundError as error:
        raise FileNotFoundError(f"> dataset sidecar missing: {sidecar_path(path)}") from error

    # (2): Rows:
    network, vertex, inputs, labels, is_training = [], [], [], [], []

    with open(path, "r", encoding = "utf-8", newline = "") as stream:
        reader = csv.reader(stream)

        # (2.1): Header check:
        if tuple(next(reader, ())) != DATASET_HEADER:
            raise SchemaMismatchError(f"> {path} is not a dataset file (expected header {','.join(DATASET_HEADER)})")

        # (2.2): Columns in header order:
        for row in reader:
            network.append(row[0])
            vertex.append(int(row[1]))
            inputs.append((float(row[2]), float(row[3])))
            labels.append(float(row[4]))
            is_training.append(row[5] == _TRAINING_SPLIT)

    # (3): Row count and stats must agree with the sidecar:
    if len(labels) != sidecar.get("rows"):
        raise SchemaMismatchError(f"> {path} holds {len(labels)} rows, its sidecar says {sidecar.get('rows')}")

    # (4): Rebuild, refitting the stats from the rows:
    dataset = Dataset.from_rows(
        np.asarray(network, dtype = object),
        np.asarray(vertex, dtype = np.int64),
        np.asarray(inputs, dtype = np.float64),
        np.asarray(labels, dtype = np.float64),
        np.asarray(is_training, dtype = bool),
        target_metric = sidecar["target_metric"],
        seed = int(sidecar["seed"]),
        manifest_sha256 = sidecar["manifest_sha256"])

    # (5): Stored and refitted stats must agree:
    stored = NormalizationStats.from_dict(sidecar["output_stats"])

    if not np.allclose(stored.mean, dataset.output_stats.mean) or not np.allclose(stored.std, dataset.output_stats.std):
        raise SchemaMismatchError(f"> the stats stored next to {path} do not match its rows")

    return dataset
