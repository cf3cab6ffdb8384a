"""Input validation helpers shared by the estimator API and the CLI."""
import numbers

import numpy as np
from sklearn.utils.validation import check_array

from .exceptions import GridMismatchError
from .fields import ProductState, SpaceSource
from .forward import ProblemSetup, default_setup

__all__ = [
    "check_setup",
    "check_state",
    "check_source",
    "check_sources_2d",
    "check_noise_level",
]


def check_setup(setup):
    """Return ``setup`` or the default example setup when ``None``."""
    if setup is None:
        return default_setup()
    if not isinstance(setup, ProblemSetup):
        raise TypeError(f"expected a ProblemSetup, got {type(setup).__name__}")
    return setup


def _as_vector(X, n_nodes, what):
    if isinstance(X, (ProductState, SpaceSource)):
        X = X.values
    arr = np.asarray(X, dtype=np.float64)
    if arr.ndim == 2 and 1 in arr.shape:
        arr = arr.ravel()
    if arr.ndim != 1:
        raise ValueError(f"{what} must be one-dimensional, got shape {arr.shape}")
    if arr.shape[0] != n_nodes:
        raise GridMismatchError(f"{what} has {arr.shape[0]} nodes, grid has {n_nodes}")
    if not np.all(np.isfinite(arr)):
        raise ValueError(f"{what} contains NaN or infinity")
    return arr


def check_state(X, setup):
    """Coerce a final-time state to a :class:`ProductState` on ``setup.space``."""
    if isinstance(X, ProductState) and X.grid != setup.space:
        raise GridMismatchError("state lives on a different grid")
    return ProductState(setup.space, _as_vector(X, setup.space.n_nodes, "state"))


def check_source(f, setup, allow_none=False):
    if f is None:
        if allow_none:
            return None
        raise ValueError("a source is required")
    if isinstance(f, SpaceSource) and f.grid != setup.space:
        raise GridMismatchError("source lives on a different grid")
    return _as_vector(f, setup.space.n_nodes, "source")


def check_sources_2d(X, setup):
    """Rows of ``X`` are nodal sources; returns a float64 2-D array."""
    X = check_array(X, dtype=np.float64)
    if X.shape[1] != setup.space.n_nodes:
        raise GridMismatchError(f"X has {X.shape[1]} columns, grid has {setup.space.n_nodes} nodes")
    return X


def check_noise_level(p):
    if not isinstance(p, numbers.Real) or not 0.0 <= p <= 1.0:
        raise ValueError(f"noise level must be a real number in [0, 1], got {p!r}")
    return float(p)
