"""
Entry point for the Block Two-Level Erdos-Renyi (BTER) generator and the
synthetic training corpus built from it.

## Description:
A network is generated in three phases:
1. Vertices are sorted by target degree and packed, across degree classes,
into affinity blocks: a block opened at a vertex of degree d takes the next
d + 1 vertices (the very last block may be smaller). Degree-1 vertices get
no block.
2. Inside every block each pair is connected with the block probability.
3. The degree still missing after phase 2 (the "excess") is matched up
Chung-Lu style: every vertex, largest excess first, draws its partners with
probability proportional to their remaining excess among the vertices it is
not yet adjacent to.

## Notes:
1. Generation is single-threaded and a pure function of the `BterConfig`,
seed included. Corpus networks can be generated on several workers because
each one owns a seed derived from (master seed, network index).
2. Under the default "calibrated" block rule the block probability is solved
from the packed blocks so that the expected global clustering coefficient
equals the target. A target above what complete blocks can reach gets
probability 1; `GenerationDiagnostics.block_probability` records the value.
"""

# Native Library | csv:
import csv

# Native Library | json:
import json

# Native Library | warnings:
import warnings

# Native Library | dataclasses:
from dataclasses import dataclass, asdict

# Native Library | pathlib:
from pathlib import Path

# Native Library | typing:
from typing import Dict, List, Optional, Tuple

# 3rd Party Library | NumPy:
import numpy as np

# Self-Import | the worker backend:
from centrank_lib import backend

# Self-Import | Graph and its helpers:
from centrank_lib.graph import Graph, global_clustering_coefficient, load_edge_list, random_pairs, write_edge_list

# Self-Import | configuration records:
from centrank_lib.inputs import BterConfig, CorpusSpec, DegreeDistributionSpec

# Self-Import | exceptions:
from centrank_lib.validation import ConfigurationError, require_positive_integer

MANIFEST_FILE_NAME = "manifest.csv"

MANIFEST_HEADER = (
    "index",
    "edge_list",
    "metadata",
    "family",
    "parameter",
    "n",
    "clustering_target",
    "seed",
    "realized_m",
    "realized_clustering",
)

@dataclass(frozen = True)
class DegreeSequence:
    """
    ## Description:
    How many vertices get each target degree, and the per-vertex target
    degrees themselves (ascending, so vertex ids follow the degree classes).
    """

    counts: Dict[int, int]
    degrees: np.ndarray

    @property
    def n(self) -> int:

        # (X): One target degree per vertex:
        return int(self.degrees.size)

    @property
    def total_degree(self) -> int:

        # (X): Always even after the parity fix:
        return int(self.degrees.sum())

@dataclass(frozen = True)
class GenerationDiagnostics:
    """
    ## Description:
    What each phase produced, and how much requested degree mass phase 3
    could not place.
    """

    n: int
    target_degree_sum: int
    block_count: int
    block_probability: float
    phase2_edges: int
    phase3_requested: int
    phase3_placed: int
    unplaced_edges: int
    realized_m: int
    realized_clustering: float

@dataclass(frozen = True)
class ManifestEntry:
    """
    One row of a corpus manifest, paths resolved against the corpus directory.
    """

    index: int
    edge_list: Path
    metadata: Path
    family: str
    parameter: float
    n: int
    clustering_target: float
    seed: int
    realized_m: int
    realized_clustering: float

    def load(self) -> Graph:
        """
        Read the network back. Isolated vertices are not part of an edge list.
        """
        # (X): Parse with the regular loader:
        with open(self.edge_list, "r", encoding = "utf-8") as stream:
            return load_edge_list(stream)

def realize_degree_sequence(n: int, distribution: DegreeDistributionSpec) -> DegreeSequence:
    """
    ## Description:
    Turn the family weights into integer vertex counts per degree.

    ## Detailed Description:
    Weights are evaluated at every integer k in [k_min, k_max] and normalized.
    Counts are the largest-remainder rounding of n * w_k (equal remainders
    favour the smaller degree), so they sum to n exactly. If the degree total
    is odd, one vertex of the most populous class moves up one degree (down
    one if it is already at n - 1).

    ## Examples:
    n = 10, heavy-tailed exponent 2, k in [1, 9] -> {1: 7, 2: 2, 3: 1}.
    """
    require_positive_integer("n", n)

    # (1): Degree range and its weights:
    k_max = distribution.resolved_k_max(n)

    # (1.1): If the range is empty, the family cannot be realized:
    if distribution.k_min > k_max:
        raise ConfigurationError(f"> k_min ({distribution.k_min}) exceeds k_max ({k_max}).")

    degrees = np.arange(distribution.k_min, k_max + 1, dtype = np.int64)
    weights = distribution.weights(degrees)

    # (1.2): ... and neither can weights that vanish or blow up:
    if not np.all(np.isfinite(weights)) or weights.sum() <= 0.:
        raise ConfigurationError(f"> degree weights of {distribution.label()} are all zero or non-finite.")

    # (2): Largest-remainder rounding:
    quotas = n * weights / weights.sum()
    counts = np.floor(quotas).astype(np.int64)
    remainder = n - int(counts.sum())

    # (2.1): Leftover vertices go to the largest remainders, smaller degree first:
    if remainder > 0:
        by_remainder = np.lexsort((degrees, -(quotas - counts)))
        counts[by_remainder[:remainder]] += 1

    counts_by_degree = {int(degree): int(count) for degree, count in zip(degrees, counts) if count > 0}

    # (3): Parity fix:
    if sum(degree * count for degree, count in counts_by_degree.items()) % 2 == 1:
        populous = max(counts_by_degree, key = lambda degree: (counts_by_degree[degree], -degree))
        moved_to = populous + 1 if populous + 1 <= n - 1 else populous - 1

        counts_by_degree[populous] -= 1
        counts_by_degree[moved_to] = counts_by_degree.get(moved_to, 0) + 1

        # (3.1): Drop an emptied class:
        if counts_by_degree[populous] == 0:
            del counts_by_degree[populous]

    # (4): Ascending degree classes, one entry per vertex:
    counts_by_degree = dict(sorted(counts_by_degree.items()))
    per_vertex = np.repeat(
        np.fromiter(counts_by_degree.keys(), dtype = np.int64),
        np.fromiter(counts_by_degree.values(), dtype = np.int64))

    return DegreeSequence(counts = counts_by_degree, degrees = per_vertex)

def affinity_blocks(degrees: np.ndarray) -> List[np.ndarray]:
    """
    ## Description:
    Phase 1: vertices of target degree d >= 2, taken in ascending degree
    order, are packed greedily into blocks. A block opened at a vertex of
    degree d holds the next d + 1 vertices, whatever their class, so no
    member can get more than its target degree inside its block. Degree-1
    (and degree-0) vertices get no block.

    ## Examples:
    degrees [1, 1, 2, 2, 2, 2, 3, 3] -> [[2, 3, 4], [5, 6, 7]].
    """
    degrees = np.asarray(degrees, dtype = np.int64)

    # (1): Vertices that take part, lowest degree first:
    order = np.argsort(degrees, kind = "stable")
    order = order[degrees[order] >= 2]

    # (2): Open a block at the next unassigned vertex and fill it:
    blocks = []
    start = 0

    while start < order.size:
        size = int(degrees[order[start]]) + 1
        blocks.append(order[start:start + size])
        start += size

    return blocks

def calibrated_block_probability(degrees: np.ndarray, blocks: List[np.ndarray], clustering_target: float) -> float:
    """
    ## Description:
    The within-block probability whose expected global clustering
    coefficient equals `clustering_target`.

    ## Detailed Description:
    A block of s vertices closes rho^3 * C(s, 3) triangles on average, and a
    network whose vertices all reach their target degree has
    sum_v C(d_v, 2) wedges. Solving 3 * triangles / wedges = target gives
    rho = (target * wedges / (3 * sum_b C(s_b, 3)))^(1/3), clipped to [0, 1].
    Triangles closed by phase 3 are left out.

    ## Examples:
    n = 4, every target degree 3, target 1 -> one block of 4 and rho = 1.
    """
    # (X): Products in float64:
    degrees = np.asarray(degrees, dtype = np.float64)
    sizes = np.array([block.size for block in blocks], dtype = np.float64)

    # (1): Wedges of the target degree sequence, and 3x the triangles of complete blocks:
    wedges = float(np.sum(degrees * (degrees - 1.)) / 2.)
    closable = float(np.sum(sizes * (sizes - 1.) * (sizes - 2.)) / 2.)

    # (2): No block can close a triangle, so the target only sets the edge density:
    if closable <= 0. or wedges <= 0.:
        return float(clustering_target)

    # (3): Cube root of the required triangle share, at most 1:
    return float(min(1., np.cbrt(clustering_target * wedges / closable)))

def block_probability(config: BterConfig, degrees: np.ndarray, blocks: List[np.ndarray]) -> float:
    """
    The within-block probability of `config` for these blocks.
    """
    # (1): The calibrated rule depends on the blocks:
    if config.block_probability is None:
        return calibrated_block_probability(degrees, blocks, config.clustering_target)

    # (2): The other rules depend on the target only:
    return config.block_probability

def _excess_edges(excess: np.ndarray, neighbours: List[set], rng: np.random.Generator) -> list:
    """
    ## Description:
    Phase 3: hand out the excess degree. Vertices are visited by decreasing
    excess, ties in random order. Each one draws as many distinct partners
    as it still needs, with probability proportional to their remaining
    excess, among the vertices it is not adjacent to. Returns the new (u, v)
    pairs with u < v.

    ## Notes:
    1. Self-loops and repeated pairs are never drawn, so every vertex gets its
    excess unless no admissible partner with excess is left.
    """
    # (X): Excess still to place, per vertex:
    n = excess.size
    remaining = excess.astype(np.int64).copy()
    accepted = []

    # (X): Largest excess first, ties shuffled:
    order = np.lexsort((rng.permutation(n), -remaining))

    for u in order.tolist():

        # (X): Already filled as a partner of an earlier vertex:
        if remaining[u] == 0:
            continue

        # (1): Partners still short of degree, other than u and its neighbours:
        weights = remaining.astype(np.float64)
        weights[u] = 0.

        if neighbours[u]:
            weights[list(neighbours[u])] = 0.

        take = min(int(remaining[u]), int(np.count_nonzero(weights)))

        # (1.1): Nobody left to pair with:
        if take == 0:
            continue

        # (2): Distinct partners, proportional to what they still need:
        partners = rng.choice(n, size = take, replace = False, p = weights / weights.sum())

        # (2.1): Record the edges and the new adjacencies:
        for v in partners.tolist():
            accepted.append((u, v) if u < v else (v, u))
            neighbours[u].add(v)
            neighbours[v].add(u)

        # (3): Both ends used one unit of excess per edge:
        remaining[u] -= take
        remaining[partners] -= 1

    return accepted

def generate_bter_with_diagnostics(config: BterConfig, verbose: bool = False) -> Tuple[Graph, GenerationDiagnostics]:
    """
    ## Description:
    Generate one network and report what every phase produced.
    """
    # (X): If the configuration is not a `BterConfig`, refuse it:
    if not isinstance(config, BterConfig):
        raise TypeError("> 'config' must be a BterConfig instance.")

    # (X): One generator drives every phase:
    rng = np.random.Generator(np.random.PCG64(config.seed))
    n = config.n

    # (1): Target degrees:
    sequence = realize_degree_sequence(n, config.distribution)
    target = sequence.degrees

    # (2): Phase 1 + phase 2:
    blocks = affinity_blocks(target)
    probability = block_probability(config, target, blocks)

    # (2.1): Bernoulli pairs inside every block:
    block_edges = [random_pairs(block, probability, rng) for block in blocks]
    phase2 = np.concatenate(block_edges) if block_edges else np.zeros((0, 2), dtype = np.int64)

    # (2.2): Degrees reached inside the blocks:
    realized = np.bincount(phase2.ravel(), minlength = n) if phase2.size else np.zeros(n, dtype = np.int64)

    # (3): Phase 3 on the excess degree:
    excess = np.maximum(0, target - realized).astype(np.int64)
    excess_total = int(excess.sum())

    # (3.1): round(total / 2), halves rounded up:
    requested = (excess_total + 1) // 2

    phase3 = []

    if requested > 0:
        # (3.2): Phase-2 adjacency, so phase 3 adds no duplicate:
        neighbours = [set() for _ in range(n)]

        for u, v in phase2.tolist():
            neighbours[u].add(v)
            neighbours[v].add(u)

        phase3 = _excess_edges(excess, neighbours, rng)

    # (3.3): Report any shortfall:
    placed = len(phase3)
    unplaced = requested - placed

    if unplaced > 0:
        warnings.warn(
            f"> BTER phase 3 placed {placed} of {requested} edges, no admissible partners were left (seed {config.seed}).",
            UserWarning)

    # (4): Assemble:
    edges = np.concatenate([phase2, np.asarray(phase3, dtype = np.int64).reshape(-1, 2)])
    graph = Graph.from_edges(n, edges)

    # (5): Diagnostics:
    diagnostics = GenerationDiagnostics(
        n = n,
        target_degree_sum = sequence.total_degree,
        block_count = len(blocks),
        block_probability = float(probability),
        phase2_edges = int(phase2.shape[0]),
        phase3_requested = requested,
        phase3_placed = placed,
        unplaced_edges = unplaced,
        realized_m = graph.m,
        realized_clustering = global_clustering_coefficient(graph))

    # (6): If the user wants the diagnostics, print them:
    if verbose:
        print(f"> [VERBOSE]: BTER {config.distribution.label()} n={n}: {json.dumps(asdict(diagnostics), sort_keys = True)}")

    return graph, diagnostics

def generate_bter(config: BterConfig, verbose: bool = False) -> Graph:
    """
    ## Description:
    Generate one simple undirected BTER network with exactly `config.n`
    vertices.

    ## Examples:
    n = 4, every target degree 3, clustering target 1 -> K4.
    """
    # (X): Diagnostics dropped:
    return generate_bter_with_diagnostics(config, verbose = verbose)[0]

def network_seeds(master_seed: int, index: int) -> Tuple[int, int]:
    """
    ## Description:
    (generator seed, clustering-target seed) of corpus network `index`.
    """
    # (1): Two independent streams per network:
    state = np.random.SeedSequence([master_seed, index]).generate_state(2, np.uint64)
    return int(state[0]), int(state[1])

def corpus_configs(spec: CorpusSpec) -> List[BterConfig]:
    """
    ## Description:
    The `BterConfig` of every corpus network, in index order: distribution,
    then size, then replicate.
    """
    # (X): Index order is distribution, size, replicate:
    configs = []
    lower, upper = spec.clustering_range

    for distribution in spec.distributions:
        for size in spec.sizes:
            for _ in range(spec.networks_per_size):

                # (1): Seeds from the network index:
                generator_seed, target_seed = network_seeds(spec.master_seed, len(configs))
                # (2): Clustering target drawn uniformly in the range:
                clustering_target = float(np.random.Generator(np.random.PCG64(target_seed)).uniform(lower, upper))

                configs.append(BterConfig(
                    n = size,
                    distribution = distribution,
                    clustering_target = clustering_target,
                    seed = generator_seed,
                    block_rule = spec.block_rule))

    return configs

def _network_stem(index: int, config: BterConfig) -> str:

    # (X): Zero-padded index, family label, size:
    return f"{index:04d}_{config.distribution.label()}_n{config.n}"

def _write_network(directory: Path, item: Tuple[int, BterConfig]) -> list:
    """
    ## Description:
    Generate and write one corpus network; returns its manifest row.
    """
    # (1): Generate:
    index, config = item
    graph, diagnostics = generate_bter_with_diagnostics(config)

    # (2): File names:
    stem = _network_stem(index, config)
    edge_list_path = Path(directory) / f"{stem}.edgelist"
    metadata_path = Path(directory) / f"{stem}.json"

    # (3): Metadata JSON:
    metadata = {
        "family": config.distribution.family,
        "parameter": config.distribution.parameter,
        "n": config.n,
        "clustering_target": config.clustering_target,
        "seed": config.seed,
        "block_rule": config.block_rule,
        "block_probability": diagnostics.block_probability,
        "realized_m": diagnostics.realized_m,
        "realized_clustering": diagnostics.realized_clustering,
        "unplaced_edges": diagnostics.unplaced_edges,
        "isolated_vertices": int(np.count_nonzero(graph.degrees == 0)),
    }

    # (4): Write both files:
    try:
        with open(edge_list_path, "w", encoding = "utf-8", newline = "\n") as stream:
            write_edge_list(graph, stream)

        with open(metadata_path, "w", encoding = "utf-8", newline = "\n") as stream:
            stream.write(json.dumps(metadata, sort_keys = True, indent = 2) + "\n")

    # (4.1): Name the directory in the error:
    except OSError as error:
        raise OSError(f"> failed writing corpus file under {directory}: {error}") from error

    # (5): Manifest row:
    return [
        index,
        edge_list_path.name,
        metadata_path.name,
        config.distribution.family,
        repr(config.distribution.parameter),
        config.n,
        repr(config.clustering_target),
        config.seed,
        diagnostics.realized_m,
        repr(diagnostics.realized_clustering),
    ]

def build_training_corpus(
        directory,
        spec: CorpusSpec,
        workers: Optional[int] = None,
        verbose: bool = False) -> List[ManifestEntry]:
    """
    ## Description:
    Generate every network of `spec` into `directory` (edge list + metadata
    JSON each) and write `manifest.csv`, one row per network. Reruns with the
    same master seed are byte-identical.

    :param directory:
        Output directory; created if missing.

    :param CorpusSpec spec:
        Distributions, sizes, networks per size, clustering range, master seed.

    :param int workers:
        Networks generated concurrently.
    """
    # (X): If the spec is not a `CorpusSpec`, refuse it:
    if not isinstance(spec, CorpusSpec):
        raise TypeError("> 'spec' must be a CorpusSpec instance.")

    # (1): Output directory:
    directory = Path(directory)

    try:
        directory.mkdir(parents = True, exist_ok = True)

    except OSError as error:
        raise OSError(f"> cannot create corpus directory {directory}: {error}") from error

    # (2): Per-network configurations:
    configs = corpus_configs(spec)

    if verbose:
        print(f"> [VERBOSE]: Generating {len(configs)} networks ({spec.vertex_count} vertices) into {directory}.")

    # (3): Networks, in index order whatever the worker count:
    rows = backend.parallel_map(_write_network, str(directory), list(enumerate(configs)), workers = workers)

    # (4): Manifest:
    manifest_path = directory / MANIFEST_FILE_NAME

    try:
        with open(manifest_path, "w", encoding = "utf-8", newline = "") as stream:
            writer = csv.writer(stream, lineterminator = "\n")
            writer.writerow(MANIFEST_HEADER)
            writer.writerows(rows)

    except OSError as error:
        raise OSError(f"> failed writing manifest {manifest_path}: {error}") from error

    if verbose:
        print(f"> [VERBOSE]: Wrote manifest {manifest_path}.")

    # (5): Read back what was written:
    return read_manifest(manifest_path)

def read_manifest(path) -> List[ManifestEntry]:
    """
    ## Description:
    Parse a corpus manifest; file paths are resolved against its directory.
    """
    path = Path(path)

    # (1): A corpus directory names its manifest:
    if path.is_dir():
        path = path / MANIFEST_FILE_NAME

    with open(path, "r", encoding = "utf-8", newline = "") as stream:
        reader = csv.DictReader(stream)

        # (2): Header check:
        if tuple(reader.fieldnames or ()) != MANIFEST_HEADER:
            raise ValueError(f"> {path} is not a corpus manifest (header {reader.fieldnames})")

        # (3): Paths relative to the manifest directory:
        return [
            ManifestEntry(
                index = int(row["index"]),
                edge_list = path.parent / row["edge_list"],
                metadata = path.parent / row["metadata"],
                family = row["family"],
                parameter = float(row["parameter"]),
                n = int(row["n"]),
                clustering_target = float(row["clustering_target"]),
                seed = int(row["seed"]),
                realized_m = int(row["realized_m"]),
                realized_clustering = float(row["realized_clustering"]))
            for row in reader]
