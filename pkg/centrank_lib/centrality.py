"""
Entry point for the exact centralities: degree, betweenness, closeness and
eigenvector.

## Description:
Betweenness and closeness come out of *one* merged Brandes pass: every source
vertex gets one breadth-first search (distances + geodesic counts) followed by
one dependency accumulation, and the same distance rows feed the farness sums
of closeness. Eigenvector centrality is the sum-normalized power method.

## Notes:
1. Betweenness counts every unordered pair once: Brandes' accumulation visits
each pair from both ends on an undirected graph, so the accumulated total is
halved.
2. Sources are processed in fixed blocks of `_SOURCE_BLOCK_SIZE` consecutive
ids. Each block produces private partial sums and blocks are merged in
ascending order, so the result is bit-identical for any worker count.
"""

# Native Library | time:
import time

# Native Library | warnings:
import warnings

# Native Library | dataclasses:
from dataclasses import dataclass, field

# Native Library | typing:
from typing import Optional, Sequence, Tuple

# 3rd Party Library | NumPy:
import numpy as np

# 3rd Party Library | SciPy:
from scipy.sparse import csgraph

# Self-Import | the worker backend:
from centrank_lib import backend

# Self-Import | Graph:
from centrank_lib.graph import Graph, component_labeling

# Self-Import | constants:
from centrank_lib.constants import (
    _EIGENVECTOR_MAX_ITERATIONS,
    _EIGENVECTOR_OSCILLATION_WINDOW,
    _EIGENVECTOR_TOLERANCE,
    _SOURCE_BLOCK_SIZE)

# Self-Import | exceptions:
from centrank_lib.validation import GraphNotConnectedError, require_positive_integer, require_positive_real

METRICS = ("degree", "betweenness", "closeness", "eigenvector")

@dataclass
class CentralityScores:
    """
    ## Description:
    Per-vertex raw values of one metric. The power method attaches its
    convergence flag and iteration count; the sampling approximators attach
    their fraction, seed and sample size in `provenance`.
    """

    # (1): degree, betweenness, closeness, or eigenvector:
    metric: str

    # (2): One value per vertex:
    values: np.ndarray

    # (3): Power method only:
    converged: Optional[bool] = None

    # (4): Power method only:
    iterations: Optional[int] = None

    # (5): Anything else worth recording (sampling parameters, wall time):
    provenance: dict = field(default_factory = dict)

@dataclass
class BrandesSourceState:
    """
    ## Description:
    Everything one Brandes pass knows about a single source.

    ## Notes:
    Predecessor lists are kept in arc form: `dag_sources[i]` is a shortest-path
    predecessor of `dag_targets[i]`. Arcs are sorted by the distance of their
    target.
    """

    source: int
    dist: np.ndarray
    sigma: np.ndarray
    order: np.ndarray
    dag_sources: np.ndarray
    dag_targets: np.ndarray
    delta: np.ndarray

    def predecessors(self, vertex: int) -> np.ndarray:

        # (X): Sources of the DAG arcs that end at `vertex`:
        return np.sort(self.dag_sources[self.dag_targets == vertex])

@dataclass
class EigenState:
    """
    ## Description:
    The power-method iterate: the sum-normalized vector, the iteration count,
    and the L1 residual ||A E / sum(A E) - E||_1 of the current vector.
    """

    vector: np.ndarray
    iteration: int = 0
    residual: float = float("inf")
    oscillation_damped: bool = False

def degree_centrality(graph: Graph) -> CentralityScores:
    """
    ## Description:
    The number of adjacencies of every vertex.
    """
    # (X): Row lengths of the CSR structure:
    return CentralityScores(metric = "degree", values = graph.degrees.astype(np.float64))

def _require_connected(graph: Graph) -> None:

    # (X): At least one vertex:
    if graph.n == 0:
        raise ValueError("> empty graph")

    # (1): One component only:
    if component_labeling(graph).component_count > 1:
        raise GraphNotConnectedError("graph not connected; extract LCC first")

def _distance_rows(graph: Graph, sources: np.ndarray) -> np.ndarray:
    """
    ## Description:
    Hop distances from each source to every vertex as an int64 matrix, -1 for
    unreachable vertices.
    """
    # (1): No edges, so every source only reaches itself:
    if graph.m == 0:
        rows = np.full((sources.size, graph.n), -1, dtype = np.int64)
        rows[np.arange(sources.size), sources] = 0
        return rows

    # (2): Unweighted Dijkstra from the sources only:
    distances = csgraph.shortest_path(graph.adjacency, method = "D", directed = False, unweighted = True, indices = sources)
    distances = np.atleast_2d(distances)

    # (3): inf marks an unreached vertex:
    rows = np.full(distances.shape, -1, dtype = np.int64)
    reached = np.isfinite(distances)
    rows[reached] = distances[reached].astype(np.int64)

    return rows

def _single_source_pass(graph: Graph, source: int, dist: np.ndarray) -> BrandesSourceState:
    """
    ## Description:
    Geodesic counts and dependency accumulation for one source, given its
    distance row. Levels are swept forward for sigma and backward for delta.
    """
    # (X): Arcs in CSR order:
    n = graph.n
    arc_sources = graph.edge_sources
    arc_targets = graph.neighbors

    # (1): Shortest-path DAG: arcs (u, v) with d(v) = d(u) + 1, u reached:
    source_distance = dist[arc_sources]
    on_dag = (source_distance >= 0) & (dist[arc_targets] == source_distance + 1)
    dag_sources = arc_sources[on_dag]
    dag_targets = arc_targets[on_dag].astype(np.int64)

    # (2): Sort arcs by the level of their target:
    levels = dist[dag_targets]
    by_level = np.argsort(levels, kind = "stable")
    dag_sources = dag_sources[by_level]
    dag_targets = dag_targets[by_level]
    levels = levels[by_level]

    # (2.1): Arc ranges per level:
    depth = int(dist.max())
    bounds = np.searchsorted(levels, np.arange(1, depth + 2))

    # (3): Forward sweep: sigma[v] = sum of sigma over predecessors:
    sigma = np.zeros(n, dtype = np.float64)
    sigma[source] = 1.

    for level in range(1, depth + 1):
        block = slice(bounds[level - 1], bounds[level])
        sigma += np.bincount(dag_targets[block], weights = sigma[dag_sources[block]], minlength = n)

    # (4): Backward sweep: delta[u] += sigma[u] / sigma[v] * (1 + delta[v]):
    delta = np.zeros(n, dtype = np.float64)

    for level in range(depth, 0, -1):
        block = slice(bounds[level - 1], bounds[level])
        heads = dag_sources[block]
        tails = dag_targets[block]
        contribution = sigma[heads] / sigma[tails] * (1. + delta[tails])
        delta += np.bincount(heads, weights = contribution, minlength = n)

    # (5): The source does not depend on itself:
    delta[source] = 0.

    # (6): Reached vertices in BFS order:
    reached = np.flatnonzero(dist >= 0)
    order = reached[np.argsort(dist[reached], kind = "stable")]

    return BrandesSourceState(
        source = int(source),
        dist = dist,
        sigma = sigma,
        order = order,
        dag_sources = dag_sources,
        dag_targets = dag_targets,
        delta = delta)

def brandes_single_source(graph: Graph, source: int) -> BrandesSourceState:
    """
    ## Description:
    One complete Brandes pass (BFS + dependency accumulation) from `source`.
    """
    # (1): If the source is not a vertex, refuse it:
    if not 0 <= source < graph.n:
        raise ValueError(f"> source {source} out of range [0, {graph.n})")

    # (2): One distance row, then the pass:
    dist = _distance_rows(graph, np.array([source]))[0]
    return _single_source_pass(graph, source, dist)

def _accumulate_block(graph: Graph, sources: np.ndarray) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
    """
    ## Description:
    Worker-private partial sums for one block of sources: the summed
    dependencies, the summed distance rows (column farness), and the row sum
    of each source (its own exact farness).
    """
    # (X): Private accumulators of this block:
    dependency_sum = np.zeros(graph.n, dtype = np.float64)
    distance_sum = np.zeros(graph.n, dtype = np.int64)
    own_farness = np.zeros(sources.size, dtype = np.int64)

    # (1): One distance matrix for the whole block:
    rows = _distance_rows(graph, sources)

    # (2): Dependencies and farness per source:
    for position, source in enumerate(sources):
        state = _single_source_pass(graph, int(source), rows[position])
        dependency_sum += state.delta
        distance_sum += rows[position]
        own_farness[position] = rows[position].sum()

    return dependency_sum, distance_sum, own_farness

def source_blocks(sources: np.ndarray) -> list:
    """
    Cut a source list into the fixed reduction blocks.
    """
    # (X): Consecutive slices, the last one possibly shorter:
    return [sources[start:start + _SOURCE_BLOCK_SIZE] for start in range(0, sources.size, _SOURCE_BLOCK_SIZE)]

def accumulate_sources(
        graph: Graph,
        sources: Sequence[int],
        workers: Optional[int] = None,
        verbose: bool = False) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
    """
    ## Description:
    Run the Brandes pass for every source, distributing fixed blocks over the
    workers and merging the partials in ascending block order.

    ## Returns:
    (summed dependencies, summed distance rows, per-source row sums), the first
    two of length n, the last aligned with `sources`.
    """
    sources = np.asarray(sources, dtype = np.int64)
    blocks = source_blocks(sources)

    # (X): If the user wants to see how the work is cut...
    if verbose:
        print(f"> [VERBOSE]: Brandes pass over {sources.size} sources in {len(blocks)} blocks.")

    # (1): One partial per block:
    partials = backend.parallel_map(_accumulate_block, graph, blocks, workers = workers)

    # (X): Accumulators for the merge:
    dependency_sum = np.zeros(graph.n, dtype = np.float64)
    distance_sum = np.zeros(graph.n, dtype = np.int64)

    # (2): Fixed-order reduction:
    for block_dependencies, block_distances, _ in partials:
        dependency_sum += block_dependencies
        distance_sum += block_distances

    # (3): Per-source farness, in source order:
    own_farness = np.concatenate([partial[2] for partial in partials]) if partials else np.zeros(0, dtype = np.int64)

    return dependency_sum, distance_sum, own_farness

def betweenness_closeness(
        graph: Graph,
        workers: Optional[int] = None,
        verbose: bool = False) -> Tuple[CentralityScores, CentralityScores]:
    """
    ## Description:
    Exact betweenness (every unordered pair once) and closeness
    (1 / sum of hop distances) from one merged Brandes pass over all sources.

    :param Graph graph:
        A connected graph (extract the LCC first).

    :param int workers:
        Worker processes; the output does not depend on it.

    ## Examples:
    Path a-b-c: betweenness (0, 1, 0); closeness (1/3, 1/2, 1/3).
    """
    # (X): A connected graph with a pair to measure:
    _require_connected(graph)

    if graph.n == 1:
        raise ValueError("closeness undefined for n=1")

    # (X): Every vertex is a source:
    start = time.perf_counter()
    worker_count = backend.resolve_workers(workers)

    dependency_sum, distance_sum, _ = accumulate_sources(
        graph, np.arange(graph.n), workers = worker_count, verbose = verbose)

    # (1): Each unordered pair was counted from both endpoints:
    betweenness = dependency_sum / 2.

    # (1.1): Closeness is the inverse farness:
    closeness = 1. / distance_sum.astype(np.float64)

    elapsed = time.perf_counter() - start

    # (X): If the user wants the timing, print it:
    if verbose:
        print(f"> [VERBOSE]: Exact betweenness/closeness on n={graph.n}, m={graph.m} took {elapsed:.3f}s.")

    # (2): Shared provenance:
    provenance = {"wall_time": elapsed, "workers": worker_count}

    return (
        CentralityScores(metric = "betweenness", values = betweenness, provenance = dict(provenance)),
        CentralityScores(metric = "closeness", values = closeness, provenance = dict(provenance)))

def exact_betweenness(graph: Graph, workers: Optional[int] = None, verbose: bool = False) -> CentralityScores:
    """
    ## Description:
    Betweenness alone; a single vertex has betweenness 0 (no closeness error).
    """
    # (1): A single vertex lies on no path:
    if graph.n == 1:
        _require_connected(graph)
        return CentralityScores(metric = "betweenness", values = np.zeros(1))

    # (2): Otherwise the merged pass, closeness dropped:
    return betweenness_closeness(graph, workers = workers, verbose = verbose)[0]

def eigenvector_centrality(
        graph: Graph,
        tol: float = _EIGENVECTOR_TOLERANCE,
        max_iter: int = _EIGENVECTOR_MAX_ITERATIONS,
        verbose: bool = False) -> CentralityScores:
    """
    ## Description:
    Power method from the all-ones vector: E <- A E / sum(A E) until the L1
    change drops below `tol` or `max_iter` iterations have run.

    ## Detailed Description:
    On bipartite graphs the plain iteration can oscillate forever between two
    vectors. When the residual has not decreased for
    `_EIGENVECTOR_OSCILLATION_WINDOW` consecutive iterations, the update
    switches to the average of the current and the next iterate,
    E <- (E + A E / sum(A E)) / 2, whose fixed point is the same principal
    eigenvector. The `oscillation_damped` provenance flag is then set and a
    warning is issued. Convergence is always judged on the plain residual.

    ## Examples:
    C5 -> 0.2 everywhere; path of 3 -> (0.29289, 0.41421, 0.29289).
    """
    # (X): Connected graph, positive tolerance and budget:
    _require_connected(graph)
    require_positive_real("tol", tol)
    require_positive_integer("max_iter", max_iter)

    n = graph.n

    # (1): A graph without edges (n = 1) has the trivial uniform vector:
    if graph.m == 0:
        return CentralityScores(
            metric = "eigenvector",
            values = np.full(n, 1. / n),
            converged = True,
            iterations = 0,
            provenance = {"residual": 0., "oscillation_damped": False})

    # (X): Start from the uniform vector:
    adjacency = graph.adjacency
    state = EigenState(vector = np.full(n, 1. / n))

    best_residual = float("inf")
    stalled_iterations = 0
    converged = False

    # (2): Iterate:
    while state.iteration < max_iter:

        product = adjacency @ state.vector
        plain_step = product / product.sum()
        state.residual = float(np.abs(plain_step - state.vector).sum())

        # (2.1): Stop on the current vector: it satisfies the residual criterion.
        if state.residual < tol:
            converged = True
            break

        # (2.2): Track stalls of the residual:
        if state.residual < best_residual:
            best_residual = state.residual
            stalled_iterations = 0

        else:
            stalled_iterations += 1

        if not state.oscillation_damped and stalled_iterations >= _EIGENVECTOR_OSCILLATION_WINDOW:
            state.oscillation_damped = True

            if verbose:
                print(f"> [VERBOSE]: Power method oscillating at iteration {state.iteration}; averaging iterates.")

        # (2.3): Advance:
        if state.oscillation_damped:
            averaged = 0.5 * (state.vector + plain_step)
            state.vector = averaged / averaged.sum()

        else:
            state.vector = plain_step

        state.iteration += 1

    # (3): Warn about averaging...
    if state.oscillation_damped:
        warnings.warn("> Power method oscillated (bipartite structure?); iterates were averaged.", UserWarning)

    # (4): ... and about a missed tolerance:
    if not converged:
        warnings.warn(
            f"> Power method did not converge within {max_iter} iterations (residual {state.residual:.3e}).",
            UserWarning)

    if verbose:
        print(f"> [VERBOSE]: Power method stopped after {state.iteration} iterations, residual {state.residual:.3e}.")

    # (5): The last iterate, with its convergence record:
    return CentralityScores(
        metric = "eigenvector",
        values = state.vector,
        converged = converged,
        iterations = state.iteration,
        provenance = {"residual": state.residual, "oscillation_damped": state.oscillation_damped})
