"""Grid-refinement studies and finite-difference checks."""
import numpy as np

from .adjoint import adjoint_identity_gap
from .fields import ProductState, SpatialGrid, TimeGrid, product_norm, space_inner
from .forward import ProblemSetup, solve_forward
from .objective import evaluate, gradient

__all__ = [
    "FD_STEPS",
    "observed_order",
    "fd_directional",
    "time_varying_modulation",
    "scaled_setup",
    "forward_errors",
    "adjoint_gaps",
    "gradient_fd_gaps",
    "constant_state_errors",
    "random_smooth",
]

FD_STEPS = (1e-2, 1e-3, 1e-4, 1e-5)


def observed_order(h, err):
    """Least-squares slope of ``log err`` against ``log h``."""
    h = np.asarray(h, dtype=float)
    err = np.asarray(err, dtype=float)
    return float(np.polyfit(np.log(h), np.log(err), 1)[0])


def fd_directional(fun, f, v, steps=FD_STEPS):
    """Central-difference derivative of ``fun`` at ``f`` along ``v``.

    Evaluates the quotient for every step and returns the value on the
    plateau, i.e. at the step whose quotient changes least to the next one.
    """
    quotients = [(fun(f + h * v) - fun(f - h * v)) / (2.0 * h) for h in steps]
    if len(quotients) == 1:
        return quotients[0]
    jumps = [abs(a - b) for a, b in zip(quotients[:-1], quotients[1:])]
    return quotients[int(np.argmin(jumps))]


def time_varying_modulation(T=1.0):
    """``r(t, x) = 1 + sin(pi t / T) (1 + x) / 2``."""
    return lambda t, x: 1.0 + 0.5 * np.sin(np.pi * t / T) * (1.0 + x)


def scaled_setup(n_cells, like=None, steps_per_cell=2, r=None, y0=0.0):
    """Setup on ``n_cells`` cells with ``steps_per_cell * n_cells`` time steps.

    Coefficients are the defaults of the numerical examples; ``r`` and ``y0``
    may be overridden with constants or callables.
    """
    ell = 1.0 if like is None else like.space.ell
    T = 1.0 if like is None else like.time.T
    return ProblemSetup.build(
        SpatialGrid(ell, n_cells), TimeGrid(T, steps_per_cell * n_cells),
        r=1.0 if r is None else r, y0=y0,
    )


def forward_errors(levels, source, reference_cells=2048, r=None):
    """Relative product-norm error of ``Y(T)`` against a fine-grid solution.

    The reference uses ``reference_cells`` cells; coarse nodes coincide with
    every ``reference_cells // n``-th fine node.
    """
    ref_setup = scaled_setup(reference_cells, r=r)
    ref = solve_forward(ref_setup, ref_setup.space.sample(source)).final.values
    errs = []
    for n in levels:
        if reference_cells % n:
            raise ValueError(f"level {n} does not divide the reference grid {reference_cells}")
        s = scaled_setup(n, r=r)
        y = solve_forward(s, s.space.sample(source)).final.values
        ref_c = ProductState(s.space, ref[:: reference_cells // n])
        errs.append(product_norm(ProductState(s.space, y) - ref_c) / product_norm(ref_c))
    return errs


def adjoint_gaps(levels, df, w, r=None):
    out = []
    for n in levels:
        s = scaled_setup(n, r=r)
        out.append(adjoint_identity_gap(s, s.space.sample(df), s.space.sample(w)))
    return out


def gradient_fd_gaps(levels, truth, direction, r=None, epsilon=0.0, f=None):
    """Relative gap between the adjoint gradient and central differences of ``J``.

    At each level the data are the exact final state of ``truth``; the
    gradient is taken at ``f`` (zero by default) along ``direction``.
    """
    out = []
    for n in levels:
        s = scaled_setup(n, r=r)
        obs = solve_forward(s, s.space.sample(truth)).final
        f0 = np.zeros(s.space.n_nodes) if f is None else s.space.sample(f)
        v = s.space.sample(direction)
        fd = fd_directional(lambda g: evaluate(s, g, obs, epsilon), f0, v)
        adj = space_inner(gradient(s, f0, obs, epsilon).values.values, v, s.space)
        out.append(abs(adj - fd) / abs(fd))
    return out


def constant_state_errors(levels, c=1.0):
    """Deviation from a constant initial state that should persist."""
    out = []
    for n in levels:
        s = scaled_setup(n, y0=c)
        y = solve_forward(s).values
        out.append(float(np.max(np.abs(y - c))))
    return out


def random_smooth(grid, rng, modes=4):
    """Random combination of the first ``modes`` cosines and sines on the grid."""
    x = grid.nodes / grid.ell
    k = np.arange(modes)[:, None]
    a = rng.standard_normal(modes) / (1.0 + np.arange(modes))
    b = rng.standard_normal(modes) / (1.0 + np.arange(modes))
    return a @ np.cos(np.pi * k * x) + b @ np.sin(np.pi * (k + 1) * x)
