"""
Uniform source sampling: run the Brandes pass from k randomly chosen sources
and extrapolate betweenness and closeness to every vertex.

## Notes:
1. Betweenness: (n / k) x the summed dependencies of the sampled sources,
halved like the exact value.
2. Closeness: the estimated farness of v is (n - 1) / |S \\ {v}| x the sum of
d(s, v) over the sampled sources s. When v is the only sampled source its
own (exact) row sum is used.
3. Sources are sorted ascending before the pass, so `fraction = 1` goes
through exactly the same arithmetic as the exact module.
"""

# Native Library | time:
import time

# Native Library | dataclasses:
from dataclasses import replace

# Native Library | typing:
from typing import List, Optional, Tuple

# 3rd Party Library | NumPy:
import numpy as np

# Self-Import | the merged Brandes pass:
from centrank_lib.centrality import CentralityScores, _require_connected, accumulate_sources

# Self-Import | Graph:
from centrank_lib.graph import Graph

# Self-Import | SampleConfig:
from centrank_lib.inputs import SampleConfig

def trial_seed(master_seed: int, trial: int) -> int:
    """
    ## Description:
    Seed of trial `trial`, derived from (master seed, trial) so that trials
    are independent and reproducible.
    """
    # (X): First 64-bit word of the spawned state:
    return int(np.random.SeedSequence([master_seed, trial]).generate_state(1, np.uint64)[0])

def sample_vertices(graph: Graph, config: SampleConfig) -> np.ndarray:
    """
    ## Description:
    max(1, ceil(fraction x n)) distinct vertices drawn uniformly without
    replacement from a PCG64 generator seeded with `config.seed`. Returned in
    ascending order.
    """
    # (X): If the configuration is not a `SampleConfig`...
    if not isinstance(config, SampleConfig):
        raise TypeError("> 'config' must be a SampleConfig instance.")

    # (X): ... or there is nothing to sample, refuse:
    if graph.n == 0:
        raise ValueError("> cannot sample from an empty graph")

    # (1): Without replacement, size from `SampleConfig.sample_size`:
    rng = np.random.Generator(np.random.PCG64(config.seed))
    chosen = rng.choice(graph.n, size = config.sample_size(graph.n), replace = False)

    # (2): Ascending order:
    return np.sort(chosen).astype(np.int64)

def approx_betweenness_closeness(
        graph: Graph,
        config: SampleConfig,
        workers: Optional[int] = None,
        verbose: bool = False) -> Tuple[CentralityScores, CentralityScores]:
    """
    ## Description:
    One sampling trial: estimated betweenness and closeness of every vertex
    from the sources picked by `sample_vertices`.

    :param Graph graph:
        A connected graph.

    :param SampleConfig config:
        Fraction and seed (its `trials` field is used by `sampled_trials`).

    ## Examples:
    fraction = 1 on a path of 3 gives betweenness (0, 1, 0) and closeness
    (1/3, 1/2, 1/3).
    """
    # (X): Same preconditions as the exact pass:
    _require_connected(graph)

    if graph.n == 1:
        raise ValueError("closeness undefined for n=1")

    start = time.perf_counter()

    # (X): Sources and the merged single-source pass over them:
    sources = sample_vertices(graph, config)
    sample_size = sources.size
    n = graph.n

    # (X): Partial sums over the sampled sources only:
    dependency_sum, distance_sum, own_farness = accumulate_sources(graph, sources, workers = workers, verbose = verbose)

    # (1): Betweenness: scale by n / k, then count every pair once:
    betweenness = (n / sample_size) * dependency_sum / 2.

    # (2): Closeness: the sources other than v each saw v at its true distance:
    in_sample = np.zeros(n, dtype = bool)
    in_sample[sources] = True
    other_sources = sample_size - in_sample.astype(np.int64)

    # (2.1): Extrapolate the seen distances to all n - 1 others:
    farness = np.empty(n, dtype = np.float64)
    usable = other_sources > 0
    farness[usable] = (n - 1) / other_sources[usable] * distance_sum[usable]

    # (3): S = {v}: v's own tree gives its exact farness:
    if not np.all(usable):
        lonely = np.flatnonzero(~usable)
        farness[lonely] = own_farness[np.searchsorted(sources, lonely)]

    # (4): Closeness is the inverse farness:
    closeness = 1. / farness

    elapsed = time.perf_counter() - start

    # (X): If the user wants the timing, print it:
    if verbose:
        print(f"> [VERBOSE]: Sampled {sample_size}/{n} sources (fraction {config.fraction}, seed {config.seed}) in {elapsed:.3f}s.")

    # (5): Each score carries its own copy of the provenance:
    provenance = {
        "fraction": config.fraction,
        "seed": config.seed,
        "sample_size": int(sample_size),
        "wall_time": elapsed,
    }

    # (6): Both estimates:
    return (
        CentralityScores(metric = "betweenness", values = betweenness, provenance = dict(provenance)),
        CentralityScores(metric = "closeness", values = closeness, provenance = dict(provenance)))

def sampled_trials(
        graph: Graph,
        config: SampleConfig,
        workers: Optional[int] = None,
        verbose: bool = False) -> List[Tuple[CentralityScores, CentralityScores]]:
    """
    ## Description:
    `config.trials` independent runs, trial t seeded from (config.seed, t).
    Trials run one after another; each one may use the workers.
    """
    # (X): One (betweenness, closeness) pair per trial:
    results = []

    for trial in range(config.trials):

        # (1): Trial seed derived from the master seed:
        trial_config = replace(config, seed = trial_seed(config.seed, trial), trials = 1)
        betweenness, closeness = approx_betweenness_closeness(graph, trial_config, workers = workers, verbose = verbose)

        # (2): Tag both scores with the trial index:
        betweenness.provenance["trial"] = trial
        closeness.provenance["trial"] = trial

        # (3): Keep the pair:
        results.append((betweenness, closeness))

    return results
