"""
# centrank Library
Exact, sampled, and learned rankings of vertex centrality!

## Description:
A Python library to rank the vertices of large networks by betweenness and
closeness: exactly (Brandes), approximately (uniform source sampling), or by
a small neural network that reads only the cheap degree and eigenvector
ranks. It also generates the synthetic BTER training networks the network
learns from.
"""

# (1): Expose the graph type and its loader:
from .graph import Graph, load_edge_list, largest_connected_component

# (2): Expose the exact centralities:
from .centrality import betweenness_closeness, degree_centrality, eigenvector_centrality

# (3): Expose the sampling approximation:
from .sampling import approx_betweenness_closeness

# (4): Expose the rank statistics:
from .ranking import kendall_tau_b, rank_transform

# (5): Expose the configuration records:
from .inputs import BterConfig, CompareConfig, CorpusSpec, DegreeDistributionSpec, SampleConfig
from .training_inputs import FirstOrderConfig, LmConfig, TrainingConfig

# (6): Expose the pipeline front class:
from .core import CentralityPipeline, compare, predict

# (7): Expose the worker backend:
from .backend import set_workers, get_workers
