"""
Entry point for the pipeline: `predict`, `compare`, `report`, and the
`CentralityPipeline` class that runs corpus -> dataset -> training ->
comparison from one configuration dictionary.

## Description:
`predict` scores a graph with a trained model. `compare` runs the exact
reference once and scores the sampling approximations and the models against
it with Kendall tau-b, R^2 and MSE on rank vectors. `report` folds many
comparison CSVs into one mean per (method, metric).
"""

# Native Library | csv:
import csv

# Native Library | time:
import time

# Native Library | warnings:
import warnings

# Native Library | dataclasses:
from dataclasses import dataclass, field

# Native Library | pathlib:
from pathlib import Path

# Native Library | typing:
from typing import Callable, Dict, List, Optional, Sequence, TextIO, Union

# 3rd Party Library | NumPy:
import numpy as np

# Self-Import | corpus generation:
from centrank_lib.bter import build_training_corpus

# Self-Import | exact centralities:
from centrank_lib.centrality import betweenness_closeness

# Self-Import | datasets:
from centrank_lib.dataset import Dataset, make_dataset, save_dataset, vertex_features

# Self-Import | graph helpers:
from centrank_lib.graph import Graph, largest_connected_component

# Self-Import | records:
from centrank_lib.inputs import CompareConfig, SampleConfig

# Self-Import | the network:
from centrank_lib.network import MlpModel, forward, load_model, save_model

# Self-Import | rank machinery and statistics:
from centrank_lib.ranking import (
    EvalReport,
    RankVector,
    confidence_interval,
    denormalize,
    kendall_tau_b,
    mean_squared_error,
    r_squared,
    rank_transform,
    read_eval_reports,
    standardize,
    write_eval_reports)

# Self-Import | sampling:
from centrank_lib.sampling import sampled_trials

# Self-Import | training:
from centrank_lib.training import train, write_history

# Self-Import | validation:
from centrank_lib.validation import SchemaMismatchError, validate_configuration

SUMMARY_HEADER = ("method", "metric", "count", "tau_b_mean", "tau_b_ci99", "r2_mean", "mse_mean", "seconds_mean")

METRICS = ("betweenness", "closeness")

ModelLike = Union[str, Path, MlpModel, Callable[[Graph], np.ndarray]]

@dataclass(frozen = True, eq = False)
class Prediction:
    """
    ## Description:
    Predicted ranks of every vertex of `graph` (the input graph, or its LCC
    when the input was disconnected), in vertex order, with external ids.
    """

    graph: Graph
    vertex_ids: np.ndarray
    ranks: RankVector
    scores: np.ndarray

@dataclass(frozen = True)
class SummaryRow:
    method: str
    metric: str
    count: int
    tau_b_mean: float
    tau_b_ci99: float
    r2_mean: float
    mse_mean: float
    seconds_mean: Optional[float]

    def as_row(self) -> list:

        # (X): Missing timing becomes an empty cell:
        seconds = "" if self.seconds_mean is None else repr(self.seconds_mean)
        return [self.method, self.metric, self.count, repr(self.tau_b_mean), repr(self.tau_b_ci99), repr(self.r2_mean), repr(self.mse_mean), seconds]

@dataclass
class ComparisonRun:
    """
    ## Description:
    Every method's `EvalReport` on one network, all against the same exact
    reference ranks.
    """

    network: str
    reports: List[EvalReport] = field(default_factory = list)

    def summary(self) -> List[SummaryRow]:

        # (X): Mean +- 99% per (method, metric):
        return summarize(self.reports)

def _resolve_model(model: ModelLike):

    # (X): A path is loaded, anything else passes through:
    if isinstance(model, (str, Path)):
        return load_model(model)

    return model

def predict_rows(model: MlpModel, features: np.ndarray) -> np.ndarray:
    """
    ## Description:
    Predicted scaled ranks of precomputed feature rows (scaled degree and
    eigenvector ranks), using the model's stored stats.
    """
    # (1): Stats travel with the model:
    if model.input_stats is None or model.output_stats is None:
        raise SchemaMismatchError("> the model carries no normalization stats")

    # (2): Standardize, forward, map back to scaled ranks:
    standardized, _ = standardize(features, model.input_stats)
    outputs = forward(model, standardized)

    # (3): Back to the scaled-rank scale:
    return denormalize(outputs.reshape(-1, 1), model.output_stats)[:, 0]

def predict(graph: Graph, model: ModelLike, verbose: bool = False) -> Prediction:
    """
    ## Description:
    Score every vertex with a trained model and turn the scores into ranks.

    ## Detailed Description:
    The degree and eigenvector ranks of the graph are normalized with the
    model's stored stats, passed through the network and mapped back to rank
    space. Predicted ranks are re-ranked (tie-averaged), so rank 1 goes to
    the vertex predicted most central. A disconnected graph is reduced to its
    LCC with a warning.

    :param Graph graph:
        Any graph.

    :param model:
        A model file path or an `MlpModel`.
    """
    # (1): Check the model shape:
    model = _resolve_model(model)

    if not isinstance(model, MlpModel):
        raise TypeError("> predict needs a model file path or an MlpModel")

    if model.layer_sizes[0] != 2 or model.layer_sizes[-1] != 1:
        raise SchemaMismatchError(f"> expected a 2-input, 1-output model, got layers {model.layer_sizes}")

    # (1.1): Something to score:
    if graph.n == 0:
        raise ValueError("> empty graph")

    # (2): Reduce to the LCC:
    if not graph.is_connected():
        reduced = largest_connected_component(graph)
        warnings.warn(
            f"> graph is disconnected; predicting on its largest connected component ({reduced.n} of {graph.n} vertices)",
            UserWarning)
        graph = reduced

    # (3): Features, scores, then rank space:
    features = vertex_features(graph, verbose = verbose)

    start = time.perf_counter()
    scores = predict_rows(model, features)
    predicted_rank = (scores + 1.) / 2. * graph.n

    # (4): A smaller predicted rank means more central:
    ranks = rank_transform(-predicted_rank)

    # (5): If the user wants the timing, print it:
    if verbose:
        print(f"> [VERBOSE]: Scored {graph.n} vertices in {time.perf_counter() - start:.4f}s.")

    return Prediction(graph = graph, vertex_ids = graph.external_ids(), ranks = ranks, scores = scores)

def _evaluate(
        network: str,
        method: str,
        metric: str,
        reference: np.ndarray,
        candidate: np.ndarray,
        seconds: Optional[float]) -> EvalReport:
    """
    ## Description:
    tau-b, R^2 and MSE of a candidate rank vector against the reference.
    Undefined statistics are recorded as NaN with a warning.
    """
    # (1): tau-b:
    try:
        tau = kendall_tau_b(reference, candidate)

    except ValueError as error:
        warnings.warn(f"> {network}/{method}/{metric}: {error}; recorded as NaN", UserWarning)
        tau = float("nan")

    # (2): R^2:
    try:
        determination = r_squared(candidate, reference)

    except ValueError as error:
        warnings.warn(f"> {network}/{method}/{metric}: {error}; recorded as NaN", UserWarning)
        determination = float("nan")

    # (3): MSE is always defined:
    return EvalReport(
        network = network,
        method = method,
        metric = metric,
        tau_b = float(tau),
        r_squared = float(determination),
        mse = mean_squared_error(candidate, reference),
        wall_time = seconds)

def compare(
        graph: Graph,
        config: Optional[CompareConfig] = None,
        models: Optional[Dict[str, ModelLike]] = None,
        network: str = "network",
        verbose: bool = False) -> ComparisonRun:
    """
    ## Description:
    Evaluate sampling and models against the exact reference on one network.

    ## Detailed Description:
    The exact betweenness and closeness are computed once and shared by all
    methods. Sampling runs `config.trials` seeds per fraction (method name
    `sample-<fraction>`, one row per trial). `models` maps a target metric to
    a model file, an `MlpModel`, or a callable returning rank values for a
    graph. Every method also gets an `exact` row (tau-b 1) carrying the time
    of the exact pass.

    :param Graph graph:
        A connected graph small enough for the exact pass.

    :param CompareConfig config:
        Fractions, trials, seed, workers and `omit_timing`.

    :param dict models:
        {metric: model}; metrics without a model are skipped.
    """
    # (X): Defaults when nothing is given:
    config = config if config is not None else CompareConfig()
    models = models or {}

    # (X): Only the two reference metrics can have a model:
    for metric in models:
        if metric not in METRICS:
            raise ValueError(f"> models can target {METRICS}, got '{metric}'")

    # (X): Seconds, or None for byte-identical reruns:
    def timing(seconds: float) -> Optional[float]:
        return None if config.omit_timing else max(0., seconds)

    run = ComparisonRun(network = network)

    # (1): The exact reference, exactly once:
    start = time.perf_counter()
    exact_betweenness, exact_closeness = betweenness_closeness(graph, workers = config.workers, verbose = verbose)
    exact_seconds = time.perf_counter() - start

    # (1.1): Exact ranks, shared by every method:
    reference = {
        "betweenness": rank_transform(exact_betweenness.values).ranks,
        "closeness": rank_transform(exact_closeness.values).ranks,
    }

    # (1.2): The exact rows:
    for metric in METRICS:
        run.reports.append(_evaluate(network, "exact", metric, reference[metric], reference[metric], timing(exact_seconds)))

    # (2): Sampling trials:
    for fraction in config.fractions:
        method = f"sample-{fraction:g}"
        sample_config = SampleConfig(fraction = fraction, seed = config.seed, trials = config.trials)

        # (2.1): One row per trial and metric:
        for betweenness, closeness in sampled_trials(graph, sample_config, workers = config.workers, verbose = verbose):
            seconds = timing(betweenness.provenance["wall_time"])

            run.reports.append(_evaluate(network, method, "betweenness", reference["betweenness"], rank_transform(betweenness.values).ranks, seconds))
            run.reports.append(_evaluate(network, method, "closeness", reference["closeness"], rank_transform(closeness.values).ranks, seconds))

    # (3): Models:
    for metric, model in models.items():
        model = _resolve_model(model)
        start = time.perf_counter()

        # (3.1): A trained network must target this metric:
        if isinstance(model, MlpModel):
            if model.target_metric is not None and model.target_metric != metric:
                raise SchemaMismatchError(f"> a {model.target_metric} model was given for {metric}")

            candidate = predict(graph, model).ranks.ranks

        # (X): Otherwise a callable returning ranks:
        else:
            candidate = model(graph)
            candidate = candidate.ranks if isinstance(candidate, RankVector) else np.asarray(candidate, dtype = np.float64)

        # (3.2): One rank per vertex:
        if candidate.shape != reference[metric].shape:
            raise SchemaMismatchError(f"> the {metric} model returned {candidate.shape[0]} ranks for {graph.n} vertices")

        run.reports.append(_evaluate(network, "model", metric, reference[metric], candidate, timing(time.perf_counter() - start)))

    # (4): If the user wants the summary, print it:
    if verbose:
        for row in run.summary():
            print(f"> [VERBOSE]: {network} {row.method:>14} {row.metric:>11}: tau-b {row.tau_b_mean:.4f} +- {row.tau_b_ci99:.4f}")

    return run

def summarize(reports: Sequence[EvalReport]) -> List[SummaryRow]:
    """
    ## Description:
    Mean +- 99% interval of tau-b per (method, metric), in first-appearance
    order. Mean seconds is None when no row carries a time.
    """
    # (1): Group by (method, metric), first appearance first:
    groups: Dict[tuple, List[EvalReport]] = {}

    for report_row in reports:
        groups.setdefault((report_row.method, report_row.metric), []).append(report_row)

    # (2): One row per group:
    summary = []

    for (method, metric), rows in groups.items():
        tau_mean, tau_half_width = confidence_interval([row.tau_b for row in rows])
        times = [row.wall_time for row in rows if row.wall_time is not None]

        summary.append(SummaryRow(
            method = method,
            metric = metric,
            count = len(rows),
            tau_b_mean = tau_mean,
            tau_b_ci99 = tau_half_width,
            r2_mean = float(np.nanmean([row.r_squared for row in rows])) if not all(np.isnan(row.r_squared) for row in rows) else float("nan"),
            mse_mean = float(np.mean([row.mse for row in rows])),
            seconds_mean = float(np.mean(times)) if times else None))

    return summary

def write_summary(rows: Sequence[SummaryRow], stream: TextIO) -> None:

    # (1): Header:
    writer = csv.writer(stream, lineterminator = "\n")
    writer.writerow(SUMMARY_HEADER)

    # (2): One line per (method, metric):
    for row in rows:
        writer.writerow(row.as_row())

def report(paths: Sequence, verbose: bool = False) -> List[SummaryRow]:
    """
    ## Description:
    Aggregate comparison CSVs: trials are first averaged per network, then
    the per-network means are summarized per (method, metric) with a 99%
    interval across networks.
    """
    per_network: List[EvalReport] = []

    # (1): Average the trials of each network:
    for path in paths:
        with open(path, "r", encoding = "utf-8", newline = "") as stream:
            rows = read_eval_reports(stream)

        # (1.1): If the user wants to follow the reads...
        if verbose:
            print(f"> [VERBOSE]: Read {len(rows)} rows from {path}.")

        # (1.2): One mean row per (network, method, metric):
        for group in _group_by_network(rows):
            times = [row.wall_time for row in group if row.wall_time is not None]

            per_network.append(EvalReport(
                network = group[0].network,
                method = group[0].method,
                metric = group[0].metric,
                tau_b = float(np.mean([row.tau_b for row in group])),
                r_squared = float(np.mean([row.r_squared for row in group])),
                mse = float(np.mean([row.mse for row in group])),
                wall_time = float(np.mean(times)) if times else None))

    # (2): Summarize across networks:
    return summarize(per_network)

def _group_by_network(rows: Sequence[EvalReport]) -> List[List[EvalReport]]:

    # (X): First appearance order:
    groups: Dict[tuple, List[EvalReport]] = {}

    for row in rows:
        groups.setdefault((row.network, row.method, row.metric), []).append(row)

    return list(groups.values())

class CentralityPipeline:
    """
    Welcome to the `CentralityPipeline` class!

    ## Description:
    Run the whole workflow from one configuration dictionary: generate the
    synthetic corpus, build one dataset per target metric, train one model
    per metric, and compare them with the sampling approximations on held-out
    networks.

    :param dict configuration:
        Keys `corpus` (CorpusSpec), `training` (TrainingConfig), and optionally
        `compare` (CompareConfig) and `workers` (int).

    :param bool verbose:
        Print progress at every stage.

    :param bool debugging:
        Print the configuration and the intermediate records as well.
    """

    def __init__(self, configuration: dict, verbose: bool = False, debugging: bool = False):

        # (1): Flags:
        self.verbose = verbose
        self.debugging = debugging

        if self.debugging:
            print(f"> [DEBUGGING]: Configuration dictionary received:\n{configuration}")

        # (2): Validate the configuration dictionary:
        validated = validate_configuration(configuration, self.verbose)

        self.corpus = validated["corpus"]
        self.training = validated["training"]
        self.compare_config = validated.get("compare") or CompareConfig(workers = validated.get("workers"))
        self.workers = validated.get("workers")

        # (3): Products of the stages, filled as they run:
        self.manifest_path: Optional[Path] = None
        self.datasets: Dict[str, Dataset] = {}
        self.models: Dict[str, MlpModel] = {}

        if self.verbose:
            print("> [VERBOSE]: Configuration succeeded!")

    def build_corpus(self, directory) -> Path:

        # (1): Generate, then remember the manifest:
        build_training_corpus(directory, self.corpus, workers = self.workers, verbose = self.verbose)
        self.manifest_path = Path(directory) / "manifest.csv"
        return self.manifest_path

    def build_dataset(self, target_metric: str, path = None) -> Dataset:

        # (1): If there is no corpus yet, there is nothing to build from:
        if self.manifest_path is None:
            raise ValueError("> build the corpus before the datasets")

        # (2): Rows and split; the validation share is what training leaves:
        dataset = make_dataset(
            self.manifest_path,
            target_metric,
            validation_fraction = 1. - self.training.training_fraction,
            seed = self.training.seed,
            workers = self.workers,
            verbose = self.verbose)

        # (3): Optionally on disk:
        if path is not None:
            save_dataset(dataset, path)

        self.datasets[target_metric] = dataset
        return dataset

    def train_model(self, target_metric: str, model_path = None, history_path = None) -> MlpModel:
        # (1): Datasets come first:
        dataset = self.datasets.get(target_metric)

        if dataset is None:
            raise ValueError(f"> no {target_metric} dataset; build it first")

        # (2): Train:
        model, state = train(dataset, self.training, verbose = self.verbose, debugging = self.debugging)

        # (3): Optional model and history files:
        if model_path is not None:
            save_model(model, model_path)

        if history_path is not None:
            with open(history_path, "w", encoding = "utf-8", newline = "") as stream:
                write_history(state, stream)

        self.models[target_metric] = model
        return model

    def compare_network(self, graph: Graph, network: str = "network") -> ComparisonRun:

        # (X): Every model trained so far:
        return compare(graph, self.compare_config, models = dict(self.models), network = network, verbose = self.verbose)

    def run(self, directory, holdout: Optional[Dict[str, Graph]] = None) -> List[ComparisonRun]:
        """
        ## Description:
        Every stage in order, artifacts written under `directory`:
        `corpus/`, `<metric>.dataset.csv`, `<metric>.model.json`,
        `<metric>.history.csv` and one `<network>.comparison.csv` per holdout
        network.
        """
        # (1): Corpus:
        directory = Path(directory)
        directory.mkdir(parents = True, exist_ok = True)

        self.build_corpus(directory / "corpus")

        # (2): One dataset and one model per metric:
        for metric in METRICS:
            self.build_dataset(metric, directory / f"{metric}.dataset.csv")
            self.train_model(metric, directory / f"{metric}.model.json", directory / f"{metric}.history.csv")

        # (3): Comparisons on the held-out networks:
        runs = []

        for name, graph in (holdout or {}).items():
            comparison = self.compare_network(graph, network = name)

            with open(directory / f"{name}.comparison.csv", "w", encoding = "utf-8", newline = "") as stream:
                write_eval_reports(comparison.reports, stream)

            runs.append(comparison)

        return runs
