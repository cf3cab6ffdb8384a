"""Grids, product-space fields, inner products and trapezoidal quadrature.

A state of the 1-D dynamic-boundary problem lives in ``L2(0, ell) x R^2``: an
interior profile plus its two boundary values. Because the boundary values are
the traces of the profile, a :class:`ProductState` stores a single nodal array
and exposes ``left``/``right`` as views of its end entries.
"""
import csv
from dataclasses import dataclass, field

import numpy as np

from .exceptions import GridMismatchError

__all__ = [
    "SpatialGrid",
    "TimeGrid",
    "ProductState",
    "SpaceSource",
    "BoundarySourcePair",
    "product_inner",
    "product_norm",
    "spacetime_inner",
    "l2_space_norm",
    "space_inner",
    "trapezoid_in_time",
    "write_space_csv",
    "write_spacetime_csv",
    "read_space_csv",
]

MIN_CELLS = 4
MIN_STEPS = 2


def _frozen(values):
    arr = np.array(values, dtype=np.float64, copy=True)
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True)
class SpatialGrid:
    """Uniform grid on ``[0, ell]`` with ``n_cells`` cells."""

    ell: float
    n_cells: int

    def __post_init__(self):
        if not self.ell > 0:
            raise ValueError(f"domain length must be positive, got {self.ell}")
        if int(self.n_cells) != self.n_cells or self.n_cells < MIN_CELLS:
            raise ValueError(f"n_cells must be an integer >= {MIN_CELLS}, got {self.n_cells}")
        object.__setattr__(self, "ell", float(self.ell))
        object.__setattr__(self, "n_cells", int(self.n_cells))

    @property
    def dx(self):
        return self.ell / self.n_cells

    @property
    def n_nodes(self):
        return self.n_cells + 1

    @property
    def nodes(self):
        x = np.arange(self.n_nodes) * self.dx
        x[-1] = self.ell
        return x

    @property
    def weights(self):
        """Composite trapezoid weights on the nodes."""
        w = np.full(self.n_nodes, self.dx)
        w[0] = w[-1] = 0.5 * self.dx
        return w

    @property
    def product_weights(self):
        """Weights of the discrete ``L2 x R^2`` inner product (trapezoid plus unit boundary mass)."""
        w = self.weights
        w[0] += 1.0
        w[-1] += 1.0
        return w

    def sample(self, fn):
        """Evaluate a callable (or broadcast a constant) on the nodes."""
        if callable(fn):
            return np.broadcast_to(np.asarray(fn(self.nodes), dtype=np.float64), (self.n_nodes,)).copy()
        return np.broadcast_to(np.asarray(fn, dtype=np.float64), (self.n_nodes,)).copy()


@dataclass(frozen=True)
class TimeGrid:
    """Uniform time levels ``t_k = k T / n_steps``."""

    T: float
    n_steps: int

    def __post_init__(self):
        if not self.T > 0:
            raise ValueError(f"final time must be positive, got {self.T}")
        if int(self.n_steps) != self.n_steps or self.n_steps < MIN_STEPS:
            raise ValueError(f"n_steps must be an integer >= {MIN_STEPS}, got {self.n_steps}")
        object.__setattr__(self, "T", float(self.T))
        object.__setattr__(self, "n_steps", int(self.n_steps))

    @property
    def dt(self):
        return self.T / self.n_steps

    @property
    def times(self):
        t = np.arange(self.n_steps + 1) * self.dt
        t[-1] = self.T
        return t

    @property
    def weights(self):
        w = np.full(self.n_steps + 1, self.dt)
        w[0] = w[-1] = 0.5 * self.dt
        return w


@dataclass(frozen=True)
class ProductState:
    """Element of ``L2(0, ell) x R^2`` sampled on a :class:`SpatialGrid`.

    ``interior`` holds all node values, endpoints included; ``left`` and
    ``right`` read the endpoint entries of the same array, so the trace
    coupling holds by construction.
    """

    grid: SpatialGrid
    values: np.ndarray = field(repr=False)

    def __post_init__(self):
        arr = _frozen(self.values)
        if arr.shape != (self.grid.n_nodes,):
            raise GridMismatchError(
                f"state has shape {arr.shape}, grid expects ({self.grid.n_nodes},)"
            )
        object.__setattr__(self, "values", arr)

    @property
    def interior(self):
        return self.values

    @property
    def left(self):
        return float(self.values[0])

    @property
    def right(self):
        return float(self.values[-1])

    @classmethod
    def zeros(cls, grid):
        return cls(grid, np.zeros(grid.n_nodes))

    @classmethod
    def from_function(cls, grid, fn):
        return cls(grid, grid.sample(fn))

    def __add__(self, other):
        _check_same_grid(self.grid, other.grid)
        return ProductState(self.grid, self.values + other.values)

    def __sub__(self, other):
        _check_same_grid(self.grid, other.grid)
        return ProductState(self.grid, self.values - other.values)

    def __mul__(self, scalar):
        return ProductState(self.grid, self.values * float(scalar))

    __rmul__ = __mul__

    def to_csv(self, path):
        write_space_csv(path, self.grid.nodes, self.values)


@dataclass(frozen=True)
class SpaceSource:
    """Spatial source ``f(x)`` sampled at the grid nodes."""

    grid: SpatialGrid
    values: np.ndarray = field(repr=False)

    def __post_init__(self):
        arr = _frozen(self.values)
        if arr.shape != (self.grid.n_nodes,):
            raise GridMismatchError(
                f"source has shape {arr.shape}, grid expects ({self.grid.n_nodes},)"
            )
        object.__setattr__(self, "values", arr)

    @classmethod
    def zeros(cls, grid):
        return cls(grid, np.zeros(grid.n_nodes))

    @classmethod
    def from_function(cls, grid, fn):
        return cls(grid, grid.sample(fn))

    def __add__(self, other):
        _check_same_grid(self.grid, other.grid)
        return SpaceSource(self.grid, self.values + other.values)

    def __sub__(self, other):
        _check_same_grid(self.grid, other.grid)
        return SpaceSource(self.grid, self.values - other.values)

    def __mul__(self, scalar):
        return SpaceSource(self.grid, self.values * float(scalar))

    __rmul__ = __mul__

    def to_csv(self, path):
        write_space_csv(path, self.grid.nodes, self.values)


@dataclass(frozen=True)
class BoundarySourcePair:
    """Boundary heat sources ``G(t, 0)`` and ``G(t, ell)`` on the time levels."""

    time: TimeGrid
    g_left: np.ndarray = field(repr=False)
    g_right: np.ndarray = field(repr=False)

    def __post_init__(self):
        for name in ("g_left", "g_right"):
            arr = _frozen(getattr(self, name))
            if arr.shape != (self.time.n_steps + 1,):
                raise GridMismatchError(
                    f"{name} has shape {arr.shape}, time grid expects ({self.time.n_steps + 1},)"
                )
            object.__setattr__(self, name, arr)

    @classmethod
    def zeros(cls, time):
        z = np.zeros(time.n_steps + 1)
        return cls(time, z, z)

    @classmethod
    def from_functions(cls, time, left, right):
        t = time.times
        sample = lambda fn: np.broadcast_to(fn(t) if callable(fn) else fn, t.shape).astype(float)
        return cls(time, sample(left), sample(right))


def _check_same_grid(g1, g2):
    if g1 != g2:
        raise GridMismatchError(f"incompatible grids: {g1} vs {g2}")


def _state_values(u, grid):
    if isinstance(u, (ProductState, SpaceSource)):
        if grid is not None:
            _check_same_grid(u.grid, grid)
        return u.values
    arr = np.asarray(u, dtype=np.float64)
    if grid is not None and arr.shape[-1:] != (grid.n_nodes,):
        raise GridMismatchError(f"array of shape {arr.shape} does not match {grid}")
    return arr


def product_inner(u, v, grid=None):
    """Discrete ``L2(0, ell) x R^2`` inner product.

    Trapezoid rule for ``int u v dx`` plus ``u(0) v(0) + u(ell) v(ell)``.
    """
    if grid is None:
        grid = getattr(u, "grid", None) or getattr(v, "grid", None)
    if grid is None:
        raise GridMismatchError("a grid is required when both arguments are plain arrays")
    a = _state_values(u, grid)
    b = _state_values(v, grid)
    if a.shape != b.shape:
        raise GridMismatchError(f"shape mismatch {a.shape} vs {b.shape}")
    return float(np.dot(grid.product_weights * a, b))


def product_norm(u, grid=None):
    return float(np.sqrt(max(product_inner(u, u, grid), 0.0)))


def space_inner(f, g, grid=None):
    """Trapezoidal ``L2(0, ell)`` inner product (no boundary mass)."""
    if grid is None:
        grid = getattr(f, "grid", None) or getattr(g, "grid", None)
    a = _state_values(f, grid)
    b = _state_values(g, grid)
    if a.shape != b.shape:
        raise GridMismatchError(f"shape mismatch {a.shape} vs {b.shape}")
    return float(np.dot(grid.weights * a, b))


def l2_space_norm(f, grid=None):
    return float(np.sqrt(max(space_inner(f, f, grid), 0.0)))


def trapezoid_in_time(series, time):
    """Trapezoid rule over the time levels along axis 0."""
    series = np.asarray(series, dtype=np.float64)
    if series.shape[0] != time.n_steps + 1:
        raise GridMismatchError(
            f"series has {series.shape[0]} time levels, time grid expects {time.n_steps + 1}"
        )
    return np.tensordot(time.weights, series, axes=(0, 0))


def spacetime_inner(u, v, space, time):
    """Discrete ``L2_T`` inner product of two state histories.

    ``u`` and ``v`` are arrays (or trajectories) of shape ``(n_steps + 1, n_nodes)``.
    """
    a = np.asarray(getattr(u, "values", u), dtype=np.float64)
    b = np.asarray(getattr(v, "values", v), dtype=np.float64)
    expected = (time.n_steps + 1, space.n_nodes)
    if a.shape != expected or b.shape != expected:
        raise GridMismatchError(f"histories of shape {a.shape}, {b.shape}; expected {expected}")
    per_level = (a * b) @ space.product_weights
    return float(time.weights @ per_level)


def write_space_csv(path, x, values, header=("x", "value")):
    columns = [np.asarray(x)] + ([np.asarray(values)] if np.ndim(values) == 1 else list(values))
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(header)
        for row in zip(*columns):
            writer.writerow([repr(float(v)) for v in row])


def write_spacetime_csv(path, t, x, values):
    values = np.asarray(values)
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(("t", "x", "value"))
        for k, tk in enumerate(t):
            tk = repr(float(tk))
            for xi, v in zip(x, values[k]):
                writer.writerow((tk, repr(float(xi)), repr(float(v))))


def read_space_csv(path, column="value"):
    """Read a node-indexed CSV, returning ``(x, column_values)``."""
    with open(path, newline="") as fh:
        rows = list(csv.DictReader(fh))
    x = np.array([float(r["x"]) for r in rows])
    return x, np.array([float(r[column]) for r in rows])
