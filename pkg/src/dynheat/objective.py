"""Tikhonov functional, its adjoint gradient and related identities."""
from dataclasses import dataclass, field

import numpy as np

from .adjoint import TerminalResidual, adjoint_pairing, solve_adjoint
from .exceptions import GridMismatchError
from .fields import (
    BoundarySourcePair,
    ProductState,
    SpaceSource,
    l2_space_norm,
    product_inner,
    product_norm,
    space_inner,
    trapezoid_in_time,
    write_space_csv,
)
from .forward import _source_values, solve_forward, source_norm_sq

__all__ = [
    "TikhonovConfig",
    "GradientField",
    "evaluate",
    "gradient",
    "gradient_from_final",
    "lipschitz_constant",
    "monotonicity_gap",
]


@dataclass(frozen=True)
class TikhonovConfig:
    epsilon: float = 1e-6
    admissible_radius: float = None

    def __post_init__(self):
        if not self.epsilon >= 0:
            raise ValueError(f"epsilon must be nonnegative, got {self.epsilon}")
        if self.admissible_radius is not None and not self.admissible_radius > 0:
            raise ValueError("admissible_radius must be positive")


@dataclass(frozen=True)
class GradientField:
    """Gradient of ``J_eps`` with respect to the spatial source.

    ``general_boundary`` carries the adjoint boundary traces, which are the
    gradient with respect to boundary sources ``G``.
    """

    values: SpaceSource
    general_boundary: BoundarySourcePair = field(default=None, repr=False)

    @property
    def norm(self):
        return l2_space_norm(self.values)

    def to_csv(self, path):
        write_space_csv(path, self.values.grid.nodes, self.values.values, header=("x", "grad"))


def _observed(obs, setup):
    data = getattr(obs, "data", obs)
    if isinstance(data, ProductState):
        if data.grid != setup.space:
            raise GridMismatchError("observation lives on a different grid")
        return data
    return ProductState(setup.space, data)


def _config(cfg):
    if cfg is None:
        return TikhonovConfig()
    if isinstance(cfg, TikhonovConfig):
        return cfg
    return TikhonovConfig(epsilon=float(cfg))


def evaluate(setup, f, obs, cfg=None):
    """``J_eps(f) = 1/2 ||Y(T, f) - Y_T^delta||^2 + eps/2 ||f||^2``."""
    cfg = _config(cfg)
    fv = _source_values(f, setup)
    res = solve_forward(setup, fv).final - _observed(obs, setup)
    return 0.5 * product_inner(res, res) + 0.5 * cfg.epsilon * space_inner(fv, fv, setup.space)


def gradient_from_final(setup, f, final, obs, cfg=None, include_boundary=False):
    """Gradient given an already computed final state ``Y(T, f)``."""
    cfg = _config(cfg)
    fv = _source_values(f, setup)
    res = TerminalResidual.from_states(final, _observed(obs, setup))
    phi = solve_adjoint(setup, res).values
    g = trapezoid_in_time(phi * setup.r, setup.time) + cfg.epsilon * fv
    boundary = None
    if include_boundary:
        boundary = BoundarySourcePair(setup.time, phi[:, 0], phi[:, -1])
    return GradientField(SpaceSource(setup.space, g), boundary)


def gradient(setup, f, obs, cfg=None, include_boundary=False):
    """Adjoint gradient ``J'_eps(f)(x) = int_0^T phi(t, x) r(t, x) dt + eps f(x)``.

    Runs the direct solve, forms the terminal residual, runs the adjoint solve
    and integrates in time with the trapezoid rule. With
    ``include_boundary=True`` the boundary traces of ``phi`` are returned as
    well.
    """
    final = solve_forward(setup, f).final
    return gradient_from_final(setup, f, final, obs, cfg, include_boundary)


def lipschitz_constant(setup, T=None):
    """``L = sqrt(2 T exp((1 + 4 max(||a||, ||b||)) T))``.

    ``T`` defaults to the final time of ``setup``; it may also be a
    :class:`~dynheat.fields.TimeGrid`.
    """
    if T is None:
        T = setup.time.T
    T = float(getattr(T, "T", T))
    m = setup.potential_bound if setup is not None else 0.0
    return float(np.sqrt(2.0 * T * np.exp((1.0 + 4.0 * m) * T)))


def monotonicity_gap(setup, f, df, obs, cfg=None):
    """Both sides of the gradient monotonicity identity.

    Returns ``(lhs, rhs)`` with ``lhs = <J'(f + df) - J'(f), df>`` and
    ``rhs = ||Psi df||^2 + eps ||df||^2``, where ``Psi df = dY(T)`` is the
    final-state increment (zero initial data).
    """
    cfg = _config(cfg)
    fv = _source_values(f, setup)
    dv = _source_values(df, setup)
    g1 = gradient(setup, fv + dv, obs, cfg).values.values
    g0 = gradient(setup, fv, obs, cfg).values.values
    lhs = space_inner(g1 - g0, dv, setup.space)
    dy = solve_forward(setup, dv, homogeneous=True).final
    rhs = product_inner(dy, dy) + cfg.epsilon * space_inner(dv, dv, setup.space)
    return lhs, rhs
