# (X): Graph loading:

# (X): Graph loading | Largest admissible vertex count (32-bit signed ids):
_MAXIMUM_VERTEX_COUNT = 2**31 - 1

# (X): Graph loading | Edge-list comment marker:
_EDGE_LIST_COMMENT_PREFIX = "#"

# (X): Exact centrality:

# (X): Exact centrality | Sources per reduction block. Fixed so the merge order
# | never depends on the number of workers:
_SOURCE_BLOCK_SIZE = 32

# (X): Exact centrality | Power-method L1 tolerance:
_EIGENVECTOR_TOLERANCE = 1e-12

# (X): Exact centrality | Power-method iteration cap:
_EIGENVECTOR_MAX_ITERATIONS = 1000

# (X): Exact centrality | Iterations without residual decrease before damping kicks in:
_EIGENVECTOR_OSCILLATION_WINDOW = 10

# (X): Statistics:

# (X): Statistics | z-value of a two-sided 99% normal interval:
_Z_VALUE_99 = 2.576

# (X): Sampling:

# (X): Sampling | Source fractions used throughout the comparison runs:
_SAMPLE_FRACTIONS = (0.025, 0.05)

# (X): Sampling | Independent trials per fraction:
_SAMPLE_TRIALS = 5

# (X): BTER:

# (X): BTER | Heavy-tailed exponents of the training corpus:
_HEAVY_TAILED_EXPONENTS = (1.5, 2.0, 2.5)

# (X): BTER | Lognormal shapes of the training corpus:
_LOGNORMAL_SHAPES = (5.0, 10.0, 15.0)

# (X): BTER | Interval the per-network clustering target is drawn from:
_CLUSTERING_TARGET_RANGE = (0.3, 0.7)

# (X): Neural network:

# (X): Neural network | Hidden layout of the final model:
_DEFAULT_HIDDEN_LAYERS = (20, 20, 20)

# (X): Neural network | Initial weights are uniform in +-(scale / sqrt(fan_in)):
_WEIGHT_INITIALIZATION_SCALE = 0.7

# (X): Neural network | Model file schema:
_MODEL_SCHEMA_VERSION = 1

# (X): Levenberg-Marquardt:
_LM_INITIAL_MU = 0.005
_LM_MAXIMUM_MU = 1e10
_LM_MU_INCREASE = 1.5
_LM_MU_DECREASE_FRACTION = 0.1

# (X): First-order trainers:
_GD_LEARNING_RATE = 0.01
_GDM_MOMENTUM = 0.9
_RPROP_INITIAL_STEP = 0.07
_RPROP_INCREASE = 1.2
_RPROP_DECREASE = 0.5
_RPROP_MAXIMUM_STEP = 50.0
_RPROP_MINIMUM_STEP = 1e-12

# (X): Training loop:

# (X): Training loop | Full batches without validation improvement before stopping:
_EARLY_STOPPING_PATIENCE = 10

# (X): Training loop | Share of rows used for fitting; the rest validates:
_TRAINING_FRACTION = 0.85

# (X): Training loop | Epoch cap when no other criterion fires:
_MAXIMUM_EPOCHS = 1000

# (X): Training loop | Samples per Jacobian chunk:
_JACOBIAN_CHUNK_SIZE = 2048

# (X): Training loop | Parameter-matched hidden layouts screened by the architecture sweep:
_ARCHITECTURE_GROUPS = (
    ((7,), (3, 3), (2, 2, 2)),
    ((11,), (4, 4), (3, 3, 3)),
    ((25,), (7, 7), (5, 5, 5)),
    ((56,), (11, 11), (8, 8, 8)),
    ((84,), (14, 14), (10, 10, 10)),
    ((175,), (21, 21), (15, 15, 15)),
    ((299,), (28, 28), (20, 20, 20)),
    ((532,), (38, 38), (27, 27, 27)),
)

# (X): Environment:

# (X): Environment | Variable read for the default worker count:
_WORKERS_ENVIRONMENT_VARIABLE = "CENTRANK_WORKERS"
