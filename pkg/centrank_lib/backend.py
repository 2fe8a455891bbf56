"""
The centrality computations are embarrassingly parallel over source vertices
and over corpus networks. Here, we provide the logic that decides *how many*
worker processes a computation may use and the one helper that fans work out
over them.
"""

# Native Library | os:
import os

# Native Library | multiprocessing:
import multiprocessing

# (X): Self-Import | the environment variable name:
from centrank_lib.constants import _WORKERS_ENVIRONMENT_VARIABLE

# (X): No explicit setting yet; the environment decides:
_workers = None

# (X): Shared read-only payload installed once per worker process:
_worker_payload = None

def set_workers(workers):
    """
    ## Description:
    We provide an interface for the user to inform the library how many
    worker processes the parallel computations may use. Passing `None`
    hands the decision back to the environment variable.
    """

    # (X): In order for this to work, we need to make the setting global:
    global _workers

    # (X): `None` resets the setting:
    if workers is None:
        _workers = None
        return

    # (X): Anything that is not a positive integer is refused:
    if isinstance(workers, bool) or not isinstance(workers, int) or workers < 1:

        # (X): ... raise a Value error demanding a *positive* integer:
        raise ValueError("Workers must be a positive integer")

    _workers = workers

def get_workers():
    """
    ## Description:
    Now that we have provided the opportunity to change the worker setting,
    we need to be able to find what it is currently set to. The precedence is
    `set_workers()` > environment variable > 1.
    """

    # (X): An explicit setting wins:
    if _workers is not None:
        return _workers

    # (X): Otherwise, consult the environment:
    environment_value = os.environ.get(_WORKERS_ENVIRONMENT_VARIABLE, "").strip()

    # (X): Unset or empty means serial:
    if not environment_value:
        return 1

    try:
        environment_workers = int(environment_value)

    except ValueError as error:
        raise ValueError(
            f"> [ERROR]: {_WORKERS_ENVIRONMENT_VARIABLE} must be a positive integer, got '{environment_value}'") from error

    if environment_workers < 1:
        raise ValueError(f"> [ERROR]: {_WORKERS_ENVIRONMENT_VARIABLE} must be >= 1, got {environment_workers}")

    return environment_workers

def resolve_workers(workers = None):
    """
    ## Description:
    An explicit argument overrides the global setting.
    """
    if workers is None:
        return get_workers()

    if isinstance(workers, bool) or not isinstance(workers, int) or workers < 1:
        raise ValueError(f"Workers must be a positive integer, got {workers!r}")

    return workers

def _install_payload(payload):
    global _worker_payload
    _worker_payload = payload

def _call_with_payload(function_and_item):
    function, item = function_and_item
    return function(_worker_payload, item)

def parallel_map(function, payload, items, workers = None):
    """
    ## Description:
    Evaluate `function(payload, item)` for every item and return the results
    *in item order*, whatever the number of workers. The payload (usually an
    immutable `Graph`) is shipped once per worker process instead of once per
    item.

    :param callable function:
        A module-level (picklable) function of two arguments.

    :param payload:
        Read-only data shared by every call.

    :param list items:
        The work items.

    :param int workers:
        Process count; `None` reads the backend setting.
    """

    # (1): Settle the worker count:
    worker_count = min(resolve_workers(workers), max(len(items), 1))

    # (2): Serial evaluation in the calling process:
    if worker_count == 1:
        return [function(payload, item) for item in items]

    # (3): `Pool.map` preserves the order of `items`:
    with multiprocessing.Pool(
        processes = worker_count,
        initializer = _install_payload,
        initargs = (payload,)) as pool:

        return pool.map(_call_with_payload, [(function, item) for item in items])
