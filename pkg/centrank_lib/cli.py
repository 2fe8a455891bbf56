"""
The `centrank` command line.

## Description:
One subcommand per pipeline operation: generate, exact, sample,
make-dataset, train, predict, compare, report. Every subcommand accepts
--seed, --workers, --output, --format and --verbose.

## Notes:
1. Exit codes: 0 on success, 1 on a usage error (usage text on stderr), 2
when the library rejects the data (`ValueError` or `OSError`).
"""

# Native Library | argparse:
import argparse

# Native Library | csv:
import csv

# Native Library | json:
import json

# Native Library | sys:
import sys

# Native Library | contextlib:
from contextlib import contextmanager

# Native Library | typing:
from typing import List, Optional, Sequence

# Self-Import | the worker backend:
from centrank_lib import backend

# Self-Import | generator:
from centrank_lib.bter import build_training_corpus, generate_bter

# Self-Import | exact centralities:
from centrank_lib.centrality import (
    betweenness_closeness,
    degree_centrality,
    eigenvector_centrality,
    exact_betweenness)

# Self-Import | pipeline:
from centrank_lib.core import compare, predict, report, write_summary

# Self-Import | datasets:
from centrank_lib.dataset import load_dataset, make_dataset, save_dataset

# Self-Import | graph helpers:
from centrank_lib.graph import largest_connected_component, load_edge_list, write_edge_list

# Self-Import | records:
from centrank_lib.inputs import BLOCK_RULES, BterConfig, CompareConfig, CorpusSpec, DegreeDistributionSpec, SampleConfig, HEAVY_TAILED

# Self-Import | models:
from centrank_lib.network import save_model

# Self-Import | evaluation rows:
from centrank_lib.ranking import write_eval_reports

# Self-Import | sampling:
from centrank_lib.sampling import sampled_trials

# Self-Import | training:
from centrank_lib.training import train, write_history

# Self-Import | trainer records:
from centrank_lib.training_inputs import ALGORITHMS, TrainingConfig

# Self-Import | exceptions:
from centrank_lib.validation import SchemaMismatchError

# (X): Exit codes:
_USAGE_ERROR = 1
_DATA_ERROR = 2

class CentrankArgumentParser(argparse.ArgumentParser):
    """
    An `ArgumentParser` whose usage errors exit with code 1.
    """

    def error(self, message):

        # (X): Usage on stderr, then exit 1 instead of argparse's 2:
        self.print_usage(sys.stderr)
        self.exit(_USAGE_ERROR, f"{self.prog}: error: {message}\n")

def _worker_count(text: str) -> int:

    # (X): An integer...
    try:
        workers = int(text)

    except ValueError as error:
        raise argparse.ArgumentTypeError(f"expected a positive integer, got '{text}'") from error

    # (X): ... of at least one:
    if workers < 1:
        raise argparse.ArgumentTypeError(f"worker count must be >= 1, got {workers}")

    return workers

def _hidden_layers(text: str) -> tuple:

    # (X): Comma-separated widths, blanks skipped:
    try:
        layers = tuple(int(width) for width in text.split(",") if width.strip())

    except ValueError as error:
        raise argparse.ArgumentTypeError(f"expected comma-separated widths, got '{text}'") from error

    # (X): At least one hidden layer:
    if not layers:
        raise argparse.ArgumentTypeError("at least one hidden layer is required")

    return layers

def _fractions(text: str) -> tuple:

    # (X): Ranges are checked by `SampleConfig`:
    try:
        return tuple(float(value) for value in text.split(",") if value.strip())

    except ValueError as error:
        raise argparse.ArgumentTypeError(f"expected comma-separated fractions, got '{text}'") from error

def build_parser() -> argparse.ArgumentParser:
    """
    ## Description:
    The parser of every subcommand, common flags attached through a parent
    parser.
    """
    # (X): Flags shared by every subcommand:
    common = argparse.ArgumentParser(add_help = False)
    common.add_argument("--seed", type = int, default = 0, help = "master seed (default 0)")
    common.add_argument("--workers", type = _worker_count, default = None, help = "worker processes (default: CENTRANK_WORKERS or 1)")
    common.add_argument("--output", default = None, help = "output file or directory (stdout when omitted)")
    common.add_argument("--format", choices = ("csv", "json"), default = "csv", help = "tabular output format")
    common.add_argument("--verbose", action = "store_true", help = "print progress")

    # (X): Top-level parser, one subparser per operation:
    parser = CentrankArgumentParser(prog = "centrank", description = "Rank vertex centralities: exact, sampled, or learned.")
    subparsers = parser.add_subparsers(dest = "command", required = True, parser_class = CentrankArgumentParser)

    # (1): generate
    generate = subparsers.add_parser("generate", parents = [common], help = "generate a BTER network or a training corpus")
    generate.add_argument("--corpus", choices = ("desk", "full"), default = None, help = "generate a whole corpus into --output")
    generate.add_argument("--n", type = int, default = None, help = "vertex count")
    generate.add_argument("--family", default = HEAVY_TAILED, help = "heavy (heavy_tailed) or lognormal")
    generate.add_argument("--lambda", dest = "exponent", type = float, default = None, help = "heavy-tailed exponent")
    generate.add_argument("--shape", type = float, default = None, help = "lognormal shape S")
    generate.add_argument("--k-min", type = int, default = 1)
    generate.add_argument("--k-max", type = int, default = None)
    generate.add_argument("--clustering", type = float, default = 0.5, help = "clustering target")
    generate.add_argument("--block-rule", choices = BLOCK_RULES, default = "calibrated")

    # (2): exact
    exact = subparsers.add_parser("exact", parents = [common], help = "exact centrality of every vertex")
    exact.add_argument("--input", required = True, help = "edge list")
    exact.add_argument("--metric", required = True, choices = ("degree", "betweenness", "closeness", "eigenvector"))

    # (3): sample
    sample = subparsers.add_parser("sample", parents = [common], help = "sampled betweenness or closeness")
    sample.add_argument("--input", required = True, help = "edge list")
    sample.add_argument("--metric", required = True, choices = ("betweenness", "closeness"))
    sample.add_argument("--fraction", type = float, required = True)
    sample.add_argument("--trials", type = int, default = 1)

    # (4): make-dataset
    dataset = subparsers.add_parser("make-dataset", parents = [common], help = "build a training dataset from a corpus")
    dataset.add_argument("--manifest", required = True, help = "corpus manifest or directory")
    dataset.add_argument("--target", required = True, choices = ("betweenness", "closeness"))
    dataset.add_argument("--validation-fraction", type = float, default = 0.15)

    # (5): train
    training = subparsers.add_parser("train", parents = [common], help = "train a model on a dataset")
    training.add_argument("--dataset", required = True)
    training.add_argument("--target", choices = ("betweenness", "closeness"), default = None, help = "must match the dataset")
    training.add_argument("--algo", choices = ALGORITHMS, default = "lm")
    training.add_argument("--hidden", type = _hidden_layers, default = (20, 20, 20), help = "hidden widths, e.g. 20,20,20")
    training.add_argument("--max-epochs", type = int, default = 1000)
    training.add_argument("--patience", type = int, default = 10)
    training.add_argument("--time-budget", type = float, default = None, help = "wall-clock budget in seconds")
    training.add_argument("--history", default = None, help = "per-epoch CSV")

    # (6): predict
    prediction = subparsers.add_parser("predict", parents = [common], help = "predicted ranks of every vertex")
    prediction.add_argument("--input", required = True)
    prediction.add_argument("--model", required = True)

    # (7): compare
    comparison = subparsers.add_parser("compare", parents = [common], help = "exact vs sampling vs models on one network")
    comparison.add_argument("--input", required = True)
    comparison.add_argument("--network", default = None, help = "name used in the report (default: input file name)")
    comparison.add_argument("--betweenness-model", default = None)
    comparison.add_argument("--closeness-model", default = None)
    comparison.add_argument("--fractions", type = _fractions, default = (0.025, 0.05))
    comparison.add_argument("--trials", type = int, default = 5)
    comparison.add_argument("--omit-timing", action = "store_true", help = "empty timing cells for byte-identical reruns")
    comparison.add_argument("--summary", default = None, help = "also write the mean +- 99%% summary here")

    # (8): report
    reporting = subparsers.add_parser("report", parents = [common], help = "aggregate comparison CSVs")
    reporting.add_argument("inputs", nargs = "+", help = "comparison CSV files")

    return parser

@contextmanager
def _output_stream(path: Optional[str]):

    # (1): No path means stdout, left open:
    if path is None:
        yield sys.stdout
        return

    # (2): Otherwise a file, closed afterwards:
    with open(path, "w", encoding = "utf-8", newline = "") as stream:
        yield stream

def _write_table(header: Sequence[str], rows: List[list], path: Optional[str], output_format: str) -> None:
    """
    ## Description:
    Write rows as CSV (with header) or as a JSON list of objects.
    """
    with _output_stream(path) as stream:
        # (1): JSON list of objects:
        if output_format == "json":
            stream.write(json.dumps([dict(zip(header, row)) for row in rows], indent = 2) + "\n")
            return

        # (2): CSV with header:
        writer = csv.writer(stream, lineterminator = "\n")
        writer.writerow(header)
        writer.writerows(rows)

def _load_graph(path: str, verbose: bool, connected: bool = True):

    # (X): Parse the edge list:
    with open(path, "r", encoding = "utf-8") as stream:
        graph = load_edge_list(stream, verbose = verbose)

    # (X): Exact and sampled passes need one component:
    if connected and not graph.is_connected():
        reduced = largest_connected_component(graph)
        print(f"> graph is disconnected; using its largest connected component ({reduced.n} of {graph.n} vertices)", file = sys.stderr)
        graph = reduced

    return graph

def _value_rows(graph, values) -> List[list]:

    # (X): External id and value of every vertex:
    return [[int(vertex), float(value)] for vertex, value in zip(graph.external_ids(), values)]

def _command_generate(args) -> None:
    # (1): A whole corpus:
    if args.corpus is not None:
        if args.output is None:
            raise ValueError("> --output (a directory) is required with --corpus")

        # (1.1): Desk scale unless asked for the full corpus:
        spec = CorpusSpec.full(args.seed) if args.corpus == "full" else CorpusSpec.desk(args.seed)
        build_training_corpus(args.output, spec, workers = args.workers, verbose = args.verbose)
        return

    # (2): A single network:
    if args.n is None:
        raise ValueError("> --n is required for a single network")

    # (2.1): Degree family and the network record:
    distribution = DegreeDistributionSpec(
        family = args.family,
        exponent = args.exponent,
        shape = args.shape,
        k_min = args.k_min,
        k_max = args.k_max)

    config = BterConfig(
        n = args.n,
        distribution = distribution,
        clustering_target = args.clustering,
        seed = args.seed,
        block_rule = args.block_rule)

    # (3): Edge list to --output or stdout:
    graph = generate_bter(config, verbose = args.verbose)

    with _output_stream(args.output) as stream:
        write_edge_list(graph, stream)

def _command_exact(args) -> None:
    graph = _load_graph(args.input, args.verbose)

    # (1): Dispatch on the metric:
    if args.metric == "degree":
        values = degree_centrality(graph).values

    elif args.metric == "eigenvector":
        values = eigenvector_centrality(graph, verbose = args.verbose).values

    elif args.metric == "betweenness":
        values = exact_betweenness(graph, workers = args.workers, verbose = args.verbose).values

    else:
        values = betweenness_closeness(graph, workers = args.workers, verbose = args.verbose)[1].values

    # (2): One row per vertex:
    _write_table(("vertex_id", "value"), _value_rows(graph, values), args.output, args.format)

def _command_sample(args) -> None:
    # (X): Connected input and the sampling record:
    graph = _load_graph(args.input, args.verbose)
    config = SampleConfig(fraction = args.fraction, seed = args.seed, trials = args.trials)

    # (X): One row per vertex and trial:
    rows = []

    for betweenness, closeness in sampled_trials(graph, config, workers = args.workers, verbose = args.verbose):
        scores = betweenness if args.metric == "betweenness" else closeness

        for vertex_id, value in _value_rows(graph, scores.values):
            rows.append([vertex_id, value, config.fraction, scores.provenance["seed"], scores.provenance["trial"]])

    # (X): Write every trial:
    _write_table(("vertex_id", "value", "fraction", "seed", "trial"), rows, args.output, args.format)

def _command_make_dataset(args) -> None:

    # (1): A dataset needs somewhere to go:
    if args.output is None:
        raise ValueError("> --output (dataset CSV path) is required")

    # (2): Build the rows:
    dataset = make_dataset(
        args.manifest,
        args.target,
        validation_fraction = args.validation_fraction,
        seed = args.seed,
        workers = args.workers,
        verbose = args.verbose)

    # (3): Rows and sidecar:
    save_dataset(dataset, args.output)

def _command_train(args) -> None:

    # (X): A model needs somewhere to go:
    if args.output is None:
        raise ValueError("> --output (model JSON path) is required")

    # (1): Dataset and its target:
    dataset = load_dataset(args.dataset)

    if args.target is not None and args.target != dataset.target_metric:
        raise SchemaMismatchError(f"> --target {args.target} but the dataset holds {dataset.target_metric} labels")

    # (2): Train and save:
    config = TrainingConfig(
        hidden_layers = args.hidden,
        algorithm = args.algo,
        max_epochs = args.max_epochs,
        patience = args.patience,
        seed = args.seed,
        time_budget = args.time_budget)

    model, state = train(dataset, config, verbose = args.verbose)
    save_model(model, args.output)

    # (3): Optional per-epoch history:
    if args.history is not None:
        with open(args.history, "w", encoding = "utf-8", newline = "") as stream:
            write_history(state, stream)

def _command_predict(args) -> None:
    # (1): Any graph; `predict` reduces it to its LCC:
    graph = _load_graph(args.input, args.verbose, connected = False)
    prediction = predict(graph, args.model, verbose = args.verbose)

    # (2): Rank and raw score per vertex:
    rows = [
        [int(vertex), float(rank), float(score)]
        for vertex, rank, score in zip(prediction.vertex_ids, prediction.ranks.ranks, prediction.scores)]

    _write_table(("vertex_id", "rank", "score"), rows, args.output, args.format)

def _command_compare(args) -> None:
    graph = _load_graph(args.input, args.verbose)

    # (1): Models by target metric:
    models = {}

    if args.betweenness_model is not None:
        models["betweenness"] = args.betweenness_model

    if args.closeness_model is not None:
        models["closeness"] = args.closeness_model

    # (2): Run the comparison:
    config = CompareConfig(
        fractions = args.fractions,
        trials = args.trials,
        seed = args.seed,
        workers = args.workers,
        omit_timing = args.omit_timing)

    # (2.1): The report names the network after its file by default:
    network = args.network if args.network is not None else args.input.replace("\\", "/").rsplit("/", 1)[-1]
    run = compare(graph, config, models = models, network = network, verbose = args.verbose)

    # (3): Per-trial rows:
    if args.format == "json":
        _write_table(
            ("network", "method", "metric", "tau_b", "r2", "mse", "seconds"),
            [[row.network, row.method, row.metric, row.tau_b, row.r_squared, row.mse, row.wall_time] for row in run.reports],
            args.output, "json")

    else:
        with _output_stream(args.output) as stream:
            write_eval_reports(run.reports, stream)

    # (4): Optional summary:
    if args.summary is not None:
        with open(args.summary, "w", encoding = "utf-8", newline = "") as stream:
            write_summary(run.summary(), stream)

def _command_report(args) -> None:
    # (1): Aggregate:
    rows = report(args.inputs, verbose = args.verbose)

    if args.format == "json":
        _write_table(
            ("method", "metric", "count", "tau_b_mean", "tau_b_ci99", "r2_mean", "mse_mean", "seconds_mean"),
            [[row.method, row.metric, row.count, row.tau_b_mean, row.tau_b_ci99, row.r2_mean, row.mse_mean, row.seconds_mean] for row in rows],
            args.output, "json")
        return

    # (2): CSV summary:
    with _output_stream(args.output) as stream:
        write_summary(rows, stream)

# (X): Subcommand name -> handler:
_COMMANDS = {
    "generate": _command_generate,
    "exact": _command_exact,
    "sample": _command_sample,
    "make-dataset": _command_make_dataset,
    "train": _command_train,
    "predict": _command_predict,
    "compare": _command_compare,
    "report": _command_report,
}

def cli(argv: Optional[Sequence[str]] = None) -> int:
    """
    ## Description:
    Parse `argv`, run the subcommand, and return the exit code.
    """
    parser = build_parser()

    # (1): Usage errors exit through argparse:
    try:
        args = parser.parse_args(argv)

    except SystemExit as exit_request:
        return int(exit_request.code or 0)

    # (2): Run the subcommand:
    try:
        args.workers = backend.resolve_workers(args.workers)
        _COMMANDS[args.command](args)

    # (3): Rejected data exits with 2:
    except (ValueError, OSError) as error:
        print(f"> [ERROR]: {error}", file = sys.stderr)
        return _DATA_ERROR

    return 0

def main() -> None:
    sys.exit(cli())
