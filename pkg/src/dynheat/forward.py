"""Direct problem: 1-D heat equation with dynamic boundary conditions.

Solves

    y_t - d y_xx + a(x) y = f(x) r(t, x)              in (0, T) x (0, ell)
    y_t(t, 0)   - d y_x(t, 0)   + b_l y(t, 0)   = g_l(t)
    y_t(t, ell) + d y_x(t, ell) + b_r y(t, ell) = g_r(t)

by the method of lines with Crank-Nicolson in time.
"""
import logging
from dataclasses import dataclass, field

import numpy as np

from ._scheme import CrankNicolson
from .exceptions import GridMismatchError, PreconditionError
from .fields import (
    BoundarySourcePair,
    ProductState,
    SpaceSource,
    SpatialGrid,
    TimeGrid,
    product_norm,
    write_spacetime_csv,
)

__all__ = [
    "ProblemSetup",
    "Trajectory",
    "default_setup",
    "solve_forward",
    "final_state",
    "input_output",
    "conservation_residual",
    "stability_gap",
    "source_norm_sq",
]

logger = logging.getLogger(__name__)


def _sample_spacetime(r, space, time):
    shape = (time.n_steps + 1, space.n_nodes)
    if callable(r):
        t, x = np.meshgrid(time.times, space.nodes, indexing="ij")
        return np.broadcast_to(np.asarray(r(t, x), dtype=np.float64), shape).copy()
    return np.broadcast_to(np.asarray(r, dtype=np.float64), shape).copy()


@dataclass(frozen=True)
class ProblemSetup:
    """Known data of the direct problem, sampled on its grids.

    Use :meth:`build` to construct one from scalars or callables.
    """

    space: SpatialGrid
    time: TimeGrid
    d: float
    a: np.ndarray = field(repr=False)
    b_left: float
    b_right: float
    r: np.ndarray = field(repr=False)
    y0: ProductState = field(repr=False)
    boundary_source: BoundarySourcePair = field(default=None, repr=False)

    def __post_init__(self):
        if not self.d > 0:
            raise ValueError(f"diffusion coefficient must be positive, got {self.d}")
        a = np.array(self.a, dtype=np.float64)
        r = np.array(self.r, dtype=np.float64)
        if a.shape != (self.space.n_nodes,):
            raise GridMismatchError(f"a has shape {a.shape}, expected ({self.space.n_nodes},)")
        if r.shape != (self.time.n_steps + 1, self.space.n_nodes):
            raise GridMismatchError(
                f"r has shape {r.shape}, expected {(self.time.n_steps + 1, self.space.n_nodes)}"
            )
        if self.y0.grid != self.space:
            raise GridMismatchError("initial state lives on a different grid")
        if self.boundary_source is not None and self.boundary_source.time != self.time:
            raise GridMismatchError("boundary source lives on a different time grid")
        a.setflags(write=False)
        r.setflags(write=False)
        object.__setattr__(self, "a", a)
        object.__setattr__(self, "r", r)
        object.__setattr__(self, "d", float(self.d))
        object.__setattr__(self, "b_left", float(self.b_left))
        object.__setattr__(self, "b_right", float(self.b_right))

    @classmethod
    def build(cls, space, time, *, d=1.0, a=0.0, b_left=0.0, b_right=0.0, r=1.0, y0=0.0,
              boundary_source=None):
        """Sample coefficients given as constants, arrays or callables.

        ``a`` and ``y0`` are functions of ``x``; ``r`` is a function of ``(t, x)``
        evaluated once on the full space-time grid.
        """
        if not isinstance(y0, ProductState):
            y0 = ProductState.from_function(space, y0)
        return cls(
            space=space,
            time=time,
            d=d,
            a=space.sample(a),
            b_left=b_left,
            b_right=b_right,
            r=_sample_spacetime(r, space, time),
            y0=y0,
            boundary_source=boundary_source,
        )

    @property
    def potential_bound(self):
        """``max(||a||_inf, ||b||_inf)``."""
        return float(max(np.max(np.abs(self.a)), abs(self.b_left), abs(self.b_right)))

    @property
    def is_conservative(self):
        no_g = self.boundary_source is None or (
            not np.any(self.boundary_source.g_left) and not np.any(self.boundary_source.g_right)
        )
        return not np.any(self.a) and self.b_left == 0.0 and self.b_right == 0.0 and no_g

    def with_time_modulation(self, r):
        return ProblemSetup.build(
            self.space, self.time, d=self.d, a=self.a, b_left=self.b_left, b_right=self.b_right,
            r=r, y0=self.y0, boundary_source=self.boundary_source,
        )


def default_setup(n_cells=256, n_steps=512, T=1.0, ell=1.0):
    """``T = 1, ell = 1, r = 1, y0 = 0, a = b = 0``: the setting of the numerical examples."""
    return ProblemSetup.build(SpatialGrid(ell, n_cells), TimeGrid(T, n_steps))


@dataclass(frozen=True)
class Trajectory:
    """Node values at every time level, shape ``(n_steps + 1, n_nodes)``."""

    space: SpatialGrid
    time: TimeGrid
    values: np.ndarray = field(repr=False)

    def __post_init__(self):
        arr = np.array(self.values, dtype=np.float64)
        if arr.shape != (self.time.n_steps + 1, self.space.n_nodes):
            raise GridMismatchError(f"trajectory has shape {arr.shape}")
        arr.setflags(write=False)
        object.__setattr__(self, "values", arr)

    def __len__(self):
        return self.values.shape[0]

    def __getitem__(self, k):
        return ProductState(self.space, self.values[k])

    @property
    def states(self):
        return [self[k] for k in range(len(self))]

    @property
    def initial(self):
        return self[0]

    @property
    def final(self):
        return self[-1]

    def to_csv(self, path):
        write_spacetime_csv(path, self.time.times, self.space.nodes, self.values)


def _source_values(f, setup):
    if f is None:
        return None
    if isinstance(f, SpaceSource):
        if f.grid != setup.space:
            raise GridMismatchError("source lives on a different grid")
        return f.values
    arr = np.asarray(f, dtype=np.float64)
    if arr.shape != (setup.space.n_nodes,):
        raise GridMismatchError(f"source has shape {arr.shape}, expected ({setup.space.n_nodes},)")
    return arr


def solve_forward(setup, f=None, *, homogeneous=False, boundary_source=None):
    """Solve the direct problem for the spatial source ``f``.

    Parameters
    ----------
    setup : ProblemSetup
    f : SpaceSource or array_like, optional
        Spatial source multiplying ``r(t, x)``; ``None`` means zero.
    homogeneous : bool
        Drop the initial state and the boundary sources of ``setup``. The final
        state is then the input-output image of ``f``.
    boundary_source : BoundarySourcePair, optional
        Overrides ``setup.boundary_source``.

    Returns
    -------
    Trajectory
    """
    fv = _source_values(f, setup)
    if homogeneous:
        start = np.zeros(setup.space.n_nodes)
        g = boundary_source
    else:
        start = setup.y0.values
        g = boundary_source if boundary_source is not None else setup.boundary_source
    values = CrankNicolson(setup).march(start, f=fv, boundary=g)
    return Trajectory(setup.space, setup.time, values)


def final_state(setup, f=None, *, homogeneous=False):
    return solve_forward(setup, f, homogeneous=homogeneous).final


def input_output(setup, f):
    """Final state with zero initial data and no boundary sources."""
    return solve_forward(setup, f, homogeneous=True).final


def conservation_residual(traj, setup, f=None):
    """Largest per-step defect of the heat balance.

    For ``a = b = 0`` and no boundary sources, integrating the equations gives
    ``d/dt [int y dx + y(t, 0) + y(t, ell)] = int f r dx``. Returns
    ``max_k |dQ_k - dt * int f (r_k + r_{k+1}) / 2 dx|`` divided by
    ``max(1, max_k |int y_k dx|)``.
    """
    if not setup.is_conservative:
        raise PreconditionError("conservation residual needs a = 0, b = 0 and no boundary sources")
    grid, time = setup.space, setup.time
    y = np.asarray(traj.values)
    fv = np.zeros(grid.n_nodes) if f is None else _source_values(f, setup)
    heat = y @ grid.product_weights
    inflow = (setup.r * fv) @ grid.weights
    expected = 0.5 * time.dt * (inflow[:-1] + inflow[1:])
    defect = np.abs(np.diff(heat) - expected)
    scale = max(1.0, float(np.max(np.abs(y @ grid.weights))))
    return float(np.max(defect) / scale)


def source_norm_sq(setup, f, boundary_source=None):
    """Squared ``L2_T`` norm of the source pair ``(f r, G)``."""
    fv = _source_values(f, setup)
    per_level = (setup.r * fv) ** 2 @ setup.space.weights
    if boundary_source is not None:
        per_level = per_level + boundary_source.g_left ** 2 + boundary_source.g_right ** 2
    return float(setup.time.weights @ per_level)


def stability_gap(setup, f1, f2):
    """Both sides of the Gronwall energy estimate for two sources.

    Returns ``(lhs, rhs)`` with ``lhs = max_t ||Y(t, f1) - Y(t, f2)||^2`` and
    ``rhs = exp((1 + 2 max(|a|, |b|)) T) ||(f1 - f2) r||^2_{L2_T}``.
    """
    y1 = solve_forward(setup, f1).values
    y2 = solve_forward(setup, f2).values
    diff = y1 - y2
    lhs = float(np.max((diff * diff) @ setup.space.product_weights))
    df = _source_values(f1, setup) - _source_values(f2, setup)
    factor = np.exp((1.0 + 2.0 * setup.potential_bound) * setup.time.T)
    return lhs, float(factor * source_norm_sq(setup, df))
