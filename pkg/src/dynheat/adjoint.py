"""Backward adjoint problem.

    phi_t + d phi_xx - a phi = 0
    phi_t(t, 0)   + d phi_x(t, 0)   - b_l phi(t, 0)   = 0
    phi_t(t, ell) - d phi_x(t, ell) - b_r phi(t, ell) = 0
    phi(T) = Y(T, f) - Y_T^delta

With ``s = T - t`` this is the direct problem with zero source, so it is
marched backward by the same Crank-Nicolson machinery.
"""
from dataclasses import dataclass

import numpy as np

from ._scheme import CrankNicolson
from .exceptions import GridMismatchError
from .fields import ProductState, product_inner, product_norm
from .forward import Trajectory, _source_values, solve_forward

__all__ = [
    "TerminalResidual",
    "AdjointTrajectory",
    "solve_adjoint",
    "adjoint_identity_gap",
    "adjoint_pairing",
]

# physical sign of the boundary flux in the adjoint boundary law; a test hook
_ADJOINT_FLUX_SIGN = 1.0


@dataclass(frozen=True)
class TerminalResidual:
    """``Y(T, f) - Y_T^delta`` as a product-space state."""

    residual: ProductState

    @classmethod
    def from_states(cls, computed, observed):
        return cls(computed - observed)


class AdjointTrajectory(Trajectory):
    """Adjoint states at every time level; the last one is the terminal datum."""

    @property
    def terminal(self):
        return self.final


def solve_adjoint(setup, res):
    """Solve the adjoint problem for a terminal residual.

    Parameters
    ----------
    setup : ProblemSetup
    res : TerminalResidual, ProductState or array_like

    Returns
    -------
    AdjointTrajectory
    """
    if isinstance(res, TerminalResidual):
        res = res.residual
    if isinstance(res, ProductState):
        if res.grid != setup.space:
            raise GridMismatchError("terminal residual lives on a different grid")
        terminal = res.values
    else:
        terminal = np.asarray(res, dtype=np.float64)
        if terminal.shape != (setup.space.n_nodes,):
            raise GridMismatchError(f"terminal residual has shape {terminal.shape}")
    scheme = CrankNicolson(setup, flux_sign=_ADJOINT_FLUX_SIGN)
    values = scheme.march(terminal, backward=True, what="adjoint")
    return AdjointTrajectory(setup.space, setup.time, values)


def adjoint_pairing(setup, phi, f=None, boundary_source=None):
    """``<(f r, G), Phi>_{L2_T}`` by the trapezoid rule in space and time."""
    phi = np.asarray(getattr(phi, "values", phi))
    per_level = np.zeros(setup.time.n_steps + 1)
    if f is not None:
        per_level += (setup.r * _source_values(f, setup) * phi) @ setup.space.weights
    if boundary_source is not None:
        per_level += boundary_source.g_left * phi[:, 0] + boundary_source.g_right * phi[:, -1]
    return float(setup.time.weights @ per_level)


def adjoint_identity_gap(setup, df, w, boundary_source=None, tiny=1e-300):
    """Relative defect of the duality ``<Psi df, w> = <df r, Phi_w>_{L2_T}``.

    ``Psi`` is evaluated with zero initial data; ``Phi_w`` is the adjoint
    solution with terminal datum ``w``. Optional boundary sources enter both
    sides.
    """
    psi = solve_forward(setup, df, homogeneous=True, boundary_source=boundary_source).final
    if not isinstance(w, ProductState):
        w = ProductState(setup.space, w)
    lhs = product_inner(psi, w)
    phi = solve_adjoint(setup, w)
    rhs = adjoint_pairing(setup, phi, df, boundary_source)
    scale = product_norm(psi) * product_norm(w)
    return abs(lhs - rhs) / (scale + tiny)
