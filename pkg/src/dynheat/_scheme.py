"""Crank-Nicolson time marching shared by the forward and adjoint solvers.

Semi-discretisation (method of lines) on the uniform grid, written in the
weighted form ``M y' = K y + q``:

* interior node i: ``dx * y_i' = d (y_{i-1} - 2 y_i + y_{i+1}) / dx - dx a_i y_i + dx f_i r_i``
* end node 0: ``(dx/2 + 1) y_0' = d (y_1 - y_0) / dx - b_l y_0 - dx/2 a_0 y_0 + dx/2 f_0 r_0 + g_l``

The end-node row follows from a ghost value eliminated through the dynamic
boundary condition, which keeps ``K`` symmetric tridiagonal and ``M`` equal to
the weight matrix of the discrete ``L2 x R^2`` inner product.  The flux sign of
the boundary law is a parameter; +1 is the physical one.
"""
import numpy as np
from scipy.linalg import solve_banded

from .exceptions import SolverInstabilityError


class CrankNicolson:
    def __init__(self, setup, flux_sign=1.0):
        grid, time = setup.space, setup.time
        h, d = grid.dx, setup.d
        c = grid.weights
        s = float(flux_sign)

        mass = c.copy()
        mass[0] += s
        mass[-1] += s

        main = np.full(grid.n_nodes, -2.0 * d / h)
        main[0] = main[-1] = -d / h
        main -= c * setup.a
        main[0] -= s * setup.b_left
        main[-1] -= s * setup.b_right
        off = np.full(grid.n_cells, d / h)

        half = 0.5 * time.dt
        ab = np.zeros((3, grid.n_nodes))
        ab[0, 1:] = -half * off
        ab[1] = mass - half * main
        ab[2, :-1] = -half * off

        self.setup = setup
        self.flux_sign = s
        self.quad = c
        self.mass = mass
        self.main = main
        self.off = off
        self._ab = ab

    def apply_explicit(self, y):
        """``(M + dt/2 K) y``."""
        half = 0.5 * self.setup.time.dt
        out = self.mass * y + half * (self.main * y)
        out[:-1] += half * self.off * y[1:]
        out[1:] += half * self.off * y[:-1]
        return out

    def stiffness_apply(self, y):
        out = self.main * y
        out[:-1] += self.off * y[1:]
        out[1:] += self.off * y[:-1]
        return out

    def _load(self, k, f, boundary):
        load = np.zeros(self.setup.space.n_nodes)
        if f is not None:
            load += self.quad * f * self.setup.r[k]
        if boundary is not None:
            load[0] += self.flux_sign * boundary.g_left[k]
            load[-1] += self.flux_sign * boundary.g_right[k]
        return load

    def march(self, start, f=None, boundary=None, backward=False, what="forward"):
        """Advance ``start`` over all time levels.

        With ``backward=True`` the march starts at ``t = T`` and runs to ``t = 0``
        (the time-reversed problem); the result is always returned in natural
        time order, shape ``(n_steps + 1, n_nodes)``.
        """
        time = self.setup.time
        n = time.n_steps
        dt = time.dt
        out = np.empty((n + 1, self.setup.space.n_nodes))
        order = range(n, -1, -1) if backward else range(n + 1)
        order = list(order)
        y = np.array(start, dtype=np.float64)
        out[order[0]] = y
        forced = f is not None or boundary is not None
        load_prev = self._load(order[0], f, boundary) if forced else None
        for k_prev, k in zip(order[:-1], order[1:]):
            rhs = self.apply_explicit(y)
            if forced:
                load = self._load(k, f, boundary)
                rhs += 0.5 * dt * (load_prev + load)
                load_prev = load
            y = solve_banded((1, 1), self._ab, rhs, check_finite=False)
            if not np.all(np.isfinite(y)):
                raise SolverInstabilityError(k, what)
            out[k] = y
        return out
