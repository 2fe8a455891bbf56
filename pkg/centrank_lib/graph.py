"""
Entry point for the `Graph` class: an immutable, undirected, unweighted simple
graph in compressed (CSR) adjacency form.

## Description:
Every algorithm of the library iterates neighbors through `offsets` and
`neighbors`: the neighbors of vertex v are `neighbors[offsets[v]:offsets[v+1]]`,
sorted ascending. Vertex ids are contiguous in [0, n); `labels` maps them back
to the external ids of the file they came from.
"""

# Native Library | json:
import json

# Native Library | dataclasses:
from dataclasses import dataclass, field, asdict

# Native Library | functools:
from functools import cached_property

# Native Library | typing:
from typing import Iterable, Optional, TextIO

# 3rd Party Library | NumPy:
import numpy as np

# 3rd Party Library | SciPy:
from scipy import sparse
from scipy.sparse import csgraph

# Self-Import | constants:
from centrank_lib.constants import _EDGE_LIST_COMMENT_PREFIX, _MAXIMUM_VERTEX_COUNT

# Self-Import | exceptions:
from centrank_lib.validation import EdgeListParseError, require_interval, require_non_negative_integer, require_seed

@dataclass(frozen = True)
class LoadDiagnostics:
    """
    ## Description:
    What the loader saw and what it dropped.
    """

    n: int
    m: int
    self_loops_dropped: int = 0
    duplicates_dropped: int = 0
    lcc_fraction: float = 1.0

    def to_json(self) -> str:

        # (X): Sorted keys, one line:
        return json.dumps(asdict(self), sort_keys = True)

@dataclass(frozen = True)
class ComponentLabeling:
    """
    ## Description:
    Connected components of a graph. Components are numbered in order of
    their smallest vertex, so "smallest index" and "contains the smallest
    vertex id" coincide.
    """

    component_id: np.ndarray
    component_sizes: np.ndarray
    lcc_index: int

    @property
    def component_count(self) -> int:

        # (X): One size per component:
        return int(self.component_sizes.size)

def _freeze(array: np.ndarray) -> np.ndarray:

    # (X): Read-only in place:
    array.setflags(write = False)
    return array

@dataclass(frozen = True, eq = False)
class Graph:
    """
    Welcome to the `Graph` class!

    ## Description:
    Immutable undirected simple graph. Build one with `Graph.from_edges` (or
    the loaders below); the constructor itself trusts its arrays.

    :param int n:
        Vertex count.

    :param int m:
        Undirected edge count.

    :param np.ndarray offsets:
        n + 1 row pointers, offsets[n] == 2m.

    :param np.ndarray neighbors:
        2m neighbor ids, sorted within each row.

    :param np.ndarray labels:
        Optional external id of each internal vertex.
    """

    n: int
    m: int
    offsets: np.ndarray
    neighbors: np.ndarray
    labels: Optional[np.ndarray] = None
    diagnostics: Optional[LoadDiagnostics] = field(default = None, compare = False)

    @classmethod
    def from_edges(
            cls,
            n: int,
            edges,
            labels: Optional[np.ndarray] = None) -> "Graph":
        """
        ## Description:
        Build a simple graph on n vertices from any (u, v) pairs. Self-loops and
        repeated pairs (in either orientation) are dropped.

        :param int n:
            Vertex count; every id in `edges` must lie in [0, n).

        :param edges:
            An (E, 2) integer array or an iterable of pairs.
        """
        # (X): The drop counts only matter to the loader:
        graph, _, _ = cls._build(n, edges, labels)
        return graph

    @classmethod
    def _build(cls, n, edges, labels):

        # (1): Coerce the pairs into an (E, 2) int64 array:
        edge_array = np.asarray(list(edges) if not isinstance(edges, np.ndarray) else edges, dtype = np.int64)
        edge_array = edge_array.reshape(-1, 2)

        # (1.1): If an endpoint falls outside [0, n), refuse the edges:
        if edge_array.size and (edge_array.min() < 0 or edge_array.max() >= n):
            raise ValueError(f"> edge endpoint out of range [0, {n})")

        # (2): Drop self-loops:
        loop_mask = edge_array[:, 0] == edge_array[:, 1]
        self_loops = int(loop_mask.sum())
        edge_array = edge_array[~loop_mask]

        # (3): Canonical orientation u < v, then unique pairs:
        lower = np.minimum(edge_array[:, 0], edge_array[:, 1])
        upper = np.maximum(edge_array[:, 0], edge_array[:, 1])
        keys = np.unique(lower * n + upper)
        duplicates = int(edge_array.shape[0] - keys.size)

        # (3.1): Decode the keys back into pairs:
        lower = keys // n if n else keys
        upper = keys % n if n else keys

        # (4): Both orientations, sorted by (source, target):
        sources = np.concatenate([lower, upper])
        targets = np.concatenate([upper, lower])
        order = np.lexsort((targets, sources))

        # (5): CSR row pointers:
        counts = np.bincount(sources, minlength = n)
        offsets = np.zeros(n + 1, dtype = np.int64)
        np.cumsum(counts, out = offsets[1:])

        # (6): int32 ids while they fit:
        neighbors = targets[order].astype(np.int32 if n <= _MAXIMUM_VERTEX_COUNT else np.int64)

        # (7): Labels are copied and frozen:
        if labels is not None:
            labels = _freeze(np.asarray(labels, dtype = np.int64).copy())

            # (7.1): One label per vertex:
            if labels.shape != (n,):
                raise ValueError(f"> labels must have length n = {n}")

        # (8): Freeze the arrays into the record:
        graph = cls(
            n = int(n),
            m = int(keys.size),
            offsets = _freeze(offsets),
            neighbors = _freeze(neighbors),
            labels = labels)

        return graph, self_loops, duplicates

    @cached_property
    def degrees(self) -> np.ndarray:

        # (X): Differences of the row pointers:
        return _freeze(np.diff(self.offsets))

    def degree(self, vertex: int) -> int:
        return int(self.offsets[vertex + 1] - self.offsets[vertex])

    def neighbors_of(self, vertex: int) -> np.ndarray:

        # (X): A read-only view into `neighbors`:
        return self.neighbors[self.offsets[vertex]:self.offsets[vertex + 1]]

    @cached_property
    def edge_sources(self) -> np.ndarray:
        """
        The source endpoint of each of the 2m directed arcs, aligned with `neighbors`.
        """
        return _freeze(np.repeat(np.arange(self.n, dtype = np.int64), self.degrees))

    @cached_property
    def adjacency(self) -> sparse.csr_matrix:
        """
        The symmetric 0/1 adjacency matrix as a SciPy CSR matrix.
        """
        # (X): Unit weights over the same CSR structure:
        data = np.ones(self.neighbors.size, dtype = np.float64)
        return sparse.csr_matrix((data, self.neighbors.copy(), self.offsets.copy()), shape = (self.n, self.n))

    def edges(self) -> np.ndarray:
        """
        ## Description:
        The m undirected edges as an (m, 2) array with u < v, in ascending order.
        """
        # (1): One orientation per edge:
        mask = self.edge_sources < self.neighbors
        return np.column_stack([self.edge_sources[mask], self.neighbors[mask].astype(np.int64)])

    def external_ids(self) -> np.ndarray:
        """
        External id of every vertex; internal ids when the graph carries no labels.
        """
        # (X): Without labels, ids are internal ids:
        if self.labels is None:
            return np.arange(self.n, dtype = np.int64)

        return self.labels

    def is_connected(self) -> bool:

        # (X): An empty graph is not connected:
        return self.n > 0 and component_labeling(self).component_count == 1

    def subgraph(self, vertices: np.ndarray) -> "Graph":
        """
        ## Description:
        The subgraph induced on `vertices`, re-indexed in the given order.
        Labels compose, so external ids survive the re-indexing.
        """
        vertices = np.asarray(vertices, dtype = np.int64)

        # (1): Old id -> new id, -1 outside the subset:
        new_index = np.full(self.n, -1, dtype = np.int64)
        new_index[vertices] = np.arange(vertices.size)

        # (2): Edges with both endpoints kept:
        edge_array = self.edges()
        keep = (new_index[edge_array[:, 0]] >= 0) & (new_index[edge_array[:, 1]] >= 0)
        remapped = new_index[edge_array[keep]]

        # (3): Rebuild with composed labels:
        return Graph.from_edges(vertices.size, remapped, labels = self.external_ids()[vertices])

def load_edge_list(stream: TextIO, verbose: bool = False) -> Graph:
    """
    ## Description:
    Read an edge list: one "u v" pair of non-negative integers per line, '#'
    comments and blank lines ignored, extra columns ignored. External ids are
    remapped to [0, n) in order of first appearance. Self-loops and duplicate
    edges are dropped and counted in `graph.diagnostics`.

    :param TextIO stream:
        Any iterable of text lines (an open file works).

    :param bool verbose:
        Print the load summary.

    ## Examples:
    lines ["0 1", "1 2"] give n = 3, m = 2.
    """

    # (1): External id -> internal id, in order of first appearance:
    index_of = {}
    endpoints = []

    # (2): Walk the lines, keeping 1-based numbers for error messages:
    for line_number, raw_line in enumerate(stream, start = 1):

        line = raw_line.strip()

        # (2.1): Blank lines and comments carry nothing:
        if not line or line.startswith(_EDGE_LIST_COMMENT_PREFIX):
            continue

        # (2.2): Two ids at least, extra columns ignored:
        tokens = line.split()

        if len(tokens) < 2:
            raise EdgeListParseError(f"expected two vertex ids, got '{line}'", line_number)

        pair = []

        for token in tokens[:2]:

            # (2.3): ASCII digits only; this refuses signs, decimals and letters:
            if not (token.isascii() and token.isdigit()):
                raise EdgeListParseError(f"malformed vertex id '{token}'", line_number)

            external_id = int(token)
            internal_id = index_of.get(external_id)

            # (2.4): A new external id gets the next internal id:
            if internal_id is None:
                internal_id = len(index_of)

                if internal_id >= _MAXIMUM_VERTEX_COUNT:
                    raise EdgeListParseError(f"vertex count reaches 2^31 (limit {_MAXIMUM_VERTEX_COUNT})", line_number)

                index_of[external_id] = internal_id

            pair.append(internal_id)

        endpoints.append(pair)

    # (3): An empty stream is an error:
    if not endpoints:
        raise ValueError("> no edges")

    # (3.1): Dict order is first appearance:
    labels = np.fromiter(index_of.keys(), dtype = np.int64, count = len(index_of))

    graph, self_loops, duplicates = Graph._build(len(index_of), np.asarray(endpoints, dtype = np.int64), labels)

    # (4): Attach the diagnostics (frozen dataclass, so through object.__setattr__):
    labeling = component_labeling(graph)
    lcc_fraction = float(labeling.component_sizes[labeling.lcc_index] / graph.n) if graph.n else 0.

    diagnostics = LoadDiagnostics(
        n = graph.n,
        m = graph.m,
        self_loops_dropped = self_loops,
        duplicates_dropped = duplicates,
        lcc_fraction = lcc_fraction)

    object.__setattr__(graph, "diagnostics", diagnostics)

    # (5): If the user wants the load summary, print it:
    if verbose:
        print(f"> [VERBOSE]: Loaded edge list: {diagnostics.to_json()}")

    return graph

def write_edge_list(graph: Graph, stream: TextIO, use_labels: bool = True) -> None:
    """
    ## Description:
    Write one "u v" line per undirected edge (u < v by internal id), preceded by
    a comment header with n and m. Isolated vertices cannot be represented.
    """
    # (X): External ids unless told otherwise:
    ids = graph.external_ids() if use_labels else np.arange(graph.n, dtype = np.int64)

    # (1): Header:
    stream.write(f"{_EDGE_LIST_COMMENT_PREFIX} n={graph.n} m={graph.m}\n")

    # (2): Edges:
    for u, v in graph.edges():
        stream.write(f"{ids[u]} {ids[v]}\n")

def component_labeling(graph: Graph) -> ComponentLabeling:
    """
    ## Description:
    Label connected components, numbering them by their smallest vertex id.
    The LCC is the largest component; ties go to the smallest index.
    """
    # (X): No vertices, no components:
    if graph.n == 0:
        return ComponentLabeling(
            component_id = np.zeros(0, dtype = np.int64),
            component_sizes = np.zeros(0, dtype = np.int64),
            lcc_index = -1)

    # (1): SciPy labels, in its own numbering:
    _, raw_labels = csgraph.connected_components(graph.adjacency, directed = False)

    # (2): Renumber by first occurrence (= smallest contained vertex):
    _, first_vertex, inverse = np.unique(raw_labels, return_index = True, return_inverse = True)
    rank_of_raw = np.empty(first_vertex.size, dtype = np.int64)
    rank_of_raw[np.argsort(first_vertex, kind = "stable")] = np.arange(first_vertex.size)

    # (3): Sizes, and the first largest component:
    component_id = rank_of_raw[inverse]
    component_sizes = np.bincount(component_id)

    return ComponentLabeling(
        component_id = component_id,
        component_sizes = component_sizes,
        lcc_index = int(np.argmax(component_sizes)))

def largest_connected_component(graph: Graph) -> Graph:
    """
    ## Description:
    The subgraph induced on the largest connected component, re-indexed in
    ascending vertex order, labels composed. An empty graph comes back empty.
    """
    # (X): Nothing to reduce:
    if graph.n == 0:
        return graph

    labeling = component_labeling(graph)

    # (1): Already connected:
    if labeling.component_count == 1:
        return graph

    # (2): Vertices of the LCC, ascending:
    vertices = np.flatnonzero(labeling.component_id == labeling.lcc_index)
    return graph.subgraph(vertices)

def global_clustering_coefficient(graph: Graph) -> float:
    """
    ## Description:
    3 x triangles / wedges, where wedges = sum_v d(v)(d(v) - 1) / 2 (the number of
    connected ordered triples halved). Zero when there is no wedge.

    ## Examples:
    K3 -> 1.0, path of 3 -> 0.0, K4 minus an edge -> 0.75.
    """
    # (1): Wedges:
    degrees = graph.degrees.astype(np.int64)
    wedges = int(np.sum(degrees * (degrees - 1)) // 2)

    # (1.1): No wedge, no clustering:
    if wedges == 0:
        return 0.

    adjacency = graph.adjacency.astype(np.int64)

    # (2): sum_ij (A^2)_ij A_ij counts each triangle six times:
    closed_walks = int((adjacency @ adjacency).multiply(adjacency).sum())
    triangles = closed_walks // 6

    # (3): Closed wedges over all wedges:
    return 3. * triangles / wedges

def erdos_renyi(n: int, p: float, seed: int = 0) -> Graph:
    """
    ## Description:
    G(n, p): each of the n(n - 1)/2 pairs is connected independently with
    probability p, from a PCG64 generator seeded with `seed`.
    """
    # (1): Check the arguments:
    require_non_negative_integer("n", n)
    require_interval("p", p, 0., 1.)
    require_seed("seed", seed)

    # (2): Draw the pairs:
    rng = np.random.Generator(np.random.PCG64(seed))
    return Graph.from_edges(n, random_pairs(np.arange(n), p, rng))

def random_pairs(vertices: np.ndarray, p: float, rng: np.random.Generator) -> np.ndarray:
    """
    ## Description:
    Bernoulli(p) selection over all unordered pairs of `vertices`, in
    row-major upper-triangle order. Shared by `erdos_renyi` and the BTER
    affinity blocks.
    """
    size = len(vertices)

    # (1): Fewer than two vertices have no pair:
    if size < 2:
        return np.zeros((0, 2), dtype = np.int64)

    # (2): One uniform draw per pair, in upper-triangle order:
    rows, columns = np.triu_indices(size, k = 1)
    keep = rng.random(rows.size) < p
    vertices = np.asarray(vertices, dtype = np.int64)

    return np.column_stack([vertices[rows[keep]], vertices[columns[keep]]])

def graph_from_lines(lines: Iterable[str]) -> Graph:
    """
    Convenience wrapper: `load_edge_list` over a list of strings.
    """
    return load_edge_list(iter(lines))
