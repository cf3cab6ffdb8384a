"""Landweber reconstruction of the spatial source from final-time data."""
import csv
import io
import logging
import math
from dataclasses import dataclass, field

import numpy as np

from .exceptions import NullSpaceDirectionError, PreconditionError
from .fields import ProductState, SpaceSource, l2_space_norm, product_inner, product_norm
from .forward import _source_values, solve_forward
from .objective import TikhonovConfig, gradient_from_final, lipschitz_constant

__all__ = [
    "NOISE_MODES",
    "Observation",
    "LandweberConfig",
    "TraceRow",
    "ReconstructionTrace",
    "RateReport",
    "make_observation",
    "relaxation_alpha",
    "run",
    "rate_bound_check",
    "error_metrics",
]

logger = logging.getLogger(__name__)

#: zeromean       -- independent uniform[-1, 1] draw per node
#: paper          -- one uniform[0, 1] draw shared by all nodes (a constant positive offset)
#: positive-field -- independent uniform[0, 1] draw per node
NOISE_MODES = ("zeromean", "paper", "positive-field")

STAGNATION_RTOL = 1e-14
TRACE_HEADER = ("k", "alpha", "J", "e", "E", "grad_norm")


def make_rng(seed):
    """PCG64 bit generator; identical streams on every platform for a given seed."""
    return np.random.Generator(np.random.PCG64(seed))


@dataclass(frozen=True)
class Observation:
    """Noisy final-time data ``Y_T^delta`` together with how it was made."""

    data: ProductState
    noise_pct: float = 0.0
    seed: int = None
    mode: str = "zeromean"
    clean: ProductState = field(default=None, repr=False)

    def __post_init__(self):
        if not 0.0 <= self.noise_pct <= 1.0:
            raise ValueError(f"noise level must lie in [0, 1], got {self.noise_pct}")
        if not np.all(np.isfinite(self.data.values)):
            raise ValueError("observation contains non-finite values")
        if self.mode not in NOISE_MODES:
            raise ValueError(f"unknown noise mode {self.mode!r}; choose from {NOISE_MODES}")


def make_observation(setup, f_true, p, seed=0, mode="zeromean"):
    """Synthesize ``Y_T^delta = Y_T + p ||Y_T|| xi``.

    ``Y_T`` is the final state of the full direct problem (initial data and
    boundary sources included). The draw ``xi`` depends on ``mode``, see
    :data:`NOISE_MODES`.
    """
    if not 0.0 <= p <= 1.0:
        raise ValueError(f"noise level must lie in [0, 1], got {p}")
    if mode not in NOISE_MODES:
        raise ValueError(f"unknown noise mode {mode!r}; choose from {NOISE_MODES}")
    clean = solve_forward(setup, f_true).final
    if p == 0.0:
        return Observation(clean, 0.0, seed, mode, clean)
    rng = make_rng(seed)
    n = setup.space.n_nodes
    if mode == "zeromean":
        xi = rng.uniform(-1.0, 1.0, n)
    elif mode == "positive-field":
        xi = rng.uniform(0.0, 1.0, n)
    else:
        xi = np.full(n, rng.uniform(0.0, 1.0))
    noisy = clean.values + p * product_norm(clean) * xi
    return Observation(ProductState(setup.space, noisy), float(p), seed, mode, clean)


@dataclass(frozen=True)
class LandweberConfig:
    """Settings of the Landweber loop.

    ``step_mode`` is ``"adaptive"`` (``alpha_k = ||p_k||^2 / ||Psi p_k||^2``),
    ``"lipschitz"`` (fixed ``alpha = 1/L``) or a positive float (fixed step).
    """

    f0: object = None
    e_J: float = 1e-6
    max_iter: int = 1000
    step_mode: object = "adaptive"
    epsilon: float = 1e-6
    admissible_radius: float = None

    def __post_init__(self):
        if not self.e_J > 0:
            raise ValueError(f"e_J must be positive, got {self.e_J}")
        if int(self.max_iter) != self.max_iter or self.max_iter < 1:
            raise ValueError(f"max_iter must be a positive integer, got {self.max_iter}")
        if isinstance(self.step_mode, str):
            if self.step_mode not in ("adaptive", "lipschitz"):
                raise ValueError(f"unknown step mode {self.step_mode!r}")
        elif not float(self.step_mode) > 0:
            raise ValueError("a fixed step must be positive")

    @property
    def tikhonov(self):
        return TikhonovConfig(self.epsilon, self.admissible_radius)


@dataclass(frozen=True)
class TraceRow:
    k: int
    alpha: float
    J: float
    e: float
    E: float
    grad_norm: float


@dataclass
class ReconstructionTrace:
    """Per-iteration record of a Landweber run.

    Row ``k`` describes iterate ``f_k``: its functional value, errors, gradient
    norm and the step ``alpha_k`` taken from it (NaN on the last row, where no
    step was taken).
    """

    rows: list
    iterates: np.ndarray = field(repr=False)
    final: SpaceSource = field(repr=False)
    stop_reason: str
    step_mode: object = "adaptive"
    fixed_alpha: float = None

    @property
    def stop_iteration(self):
        return self.rows[-1].k

    def column(self, name):
        return np.array([getattr(r, name) for r in self.rows], dtype=float)

    def to_csv_text(self):
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(TRACE_HEADER)
        for r in self.rows:
            writer.writerow([r.k] + [_fmt(getattr(r, c)) for c in TRACE_HEADER[1:]])
        return buf.getvalue()

    def to_csv(self, path):
        with open(path, "w", newline="") as fh:
            fh.write(self.to_csv_text())


def _fmt(v):
    if v is None or (isinstance(v, float) and math.isnan(v)):
        return ""
    return repr(float(v))


def _relaxation(setup, p):
    pv = _source_values(p, setup)
    num = float(np.dot(setup.space.weights * pv, pv))
    if num == 0.0:
        raise PreconditionError("relaxation parameter is undefined for a zero direction")
    psi_p = solve_forward(setup, pv, homogeneous=True).final
    den = product_inner(psi_p, psi_p)
    if den == 0.0:
        raise NullSpaceDirectionError("nonzero direction is annihilated by the input-output map")
    return num / den, psi_p


def relaxation_alpha(setup, p):
    """``||p||^2_{L2} / ||Psi p||^2_{L2 x R^2}`` with ``Psi`` at zero initial data."""
    return _relaxation(setup, p)[0]


def error_metrics(f_k, f_true, obs_clean, setup):
    """Convergence error ``e = ||Y(T, f_k) - Y_T||^2`` and accuracy error ``E = ||f_true - f_k||``.

    ``E`` is ``None`` when no truth is given.
    """
    clean = getattr(obs_clean, "clean", None) or getattr(obs_clean, "data", obs_clean)
    if not isinstance(clean, ProductState):
        clean = ProductState(setup.space, clean)
    diff = solve_forward(setup, f_k).final - clean
    e = product_inner(diff, diff)
    E = None
    if f_true is not None:
        E = l2_space_norm(_source_values(f_true, setup) - _source_values(f_k, setup), setup.space)
    return e, E


def run(setup, obs, cfg=None, truth=None):
    """Landweber iteration ``f_{k+1} = f_k - alpha_k J'_eps(f_k)``.

    Per iteration: adjoint solve for the gradient ``p_k``, one direct solve
    for ``Psi p_k`` (which also fixes the adaptive step), update. By linearity
    ``Y(T, f_{k+1}) = Y(T, f_k) - alpha_k Psi p_k``, so no further direct
    solve is needed to evaluate ``J_eps(f_{k+1})``.

    Stops when ``J_eps(f_k) < e_J`` (``"threshold"``), after ``max_iter``
    updates (``"cap"``), or when the relative decrease of ``J_eps`` drops below
    1e-14 or the gradient vanishes (``"stagnation"``).
    """
    cfg = cfg or LandweberConfig()
    if not isinstance(obs, Observation):
        obs = Observation(obs if isinstance(obs, ProductState) else ProductState(setup.space, obs))
    grid = setup.space
    w = grid.weights
    eps = cfg.epsilon
    f = np.zeros(grid.n_nodes) if cfg.f0 is None else np.array(_source_values(cfg.f0, setup))
    f_true = None if truth is None else _source_values(truth, setup)

    fixed = None
    if cfg.step_mode == "lipschitz":
        fixed = 1.0 / lipschitz_constant(setup)
    elif not isinstance(cfg.step_mode, str):
        fixed = float(cfg.step_mode)

    y_final = solve_forward(setup, f).final.values
    data = obs.data.values
    clean = None if obs.clean is None else obs.clean.values

    def functional(f, y):
        r = y - data
        return 0.5 * float(np.dot(grid.product_weights * r, r)) + 0.5 * eps * float(np.dot(w * f, f))

    def metrics(f, y):
        e = float("nan") if clean is None else product_inner(y - clean, y - clean, grid)
        E = float("nan") if f_true is None else l2_space_norm(f_true - f, grid)
        return e, E

    rows, iterates = [], [f.copy()]
    J = functional(f, y_final)
    stop = None
    k = 0
    while True:
        e, E = metrics(f, y_final)
        if J < cfg.e_J:
            rows.append(TraceRow(k, float("nan"), J, e, E, float("nan")))
            stop = "threshold"
            break
        if k >= cfg.max_iter:
            rows.append(TraceRow(k, float("nan"), J, e, E, float("nan")))
            stop = "cap"
            break
        p = gradient_from_final(setup, f, ProductState(grid, y_final), obs.data, eps).values.values
        gnorm = l2_space_norm(p, grid)
        if gnorm == 0.0:
            rows.append(TraceRow(k, float("nan"), J, e, E, 0.0))
            stop = "stagnation"
            break
        if fixed is None:
            alpha, psi_p = _relaxation(setup, p)
            psi_p = psi_p.values
        else:
            alpha = fixed
            psi_p = solve_forward(setup, p, homogeneous=True).final.values
        rows.append(TraceRow(k, alpha, J, e, E, gnorm))

        f = f - alpha * p
        y_final = y_final - alpha * psi_p
        iterates.append(f.copy())
        J_next = functional(f, y_final)
        k += 1
        if cfg.admissible_radius is not None and l2_space_norm(f, grid) > cfg.admissible_radius:
            logger.warning("iterate %d leaves the admissible ball (||f|| > %g)", k, cfg.admissible_radius)
        stagnated = J - J_next < STAGNATION_RTOL * J
        J = J_next
        if stagnated and J >= cfg.e_J:
            e, E = metrics(f, y_final)
            rows.append(TraceRow(k, float("nan"), J, e, E, float("nan")))
            stop = "stagnation"
            break

    return ReconstructionTrace(
        rows=rows,
        iterates=np.array(iterates),
        final=SpaceSource(grid, f),
        stop_reason=stop,
        step_mode=cfg.step_mode,
        fixed_alpha=fixed,
    )


@dataclass(frozen=True)
class RateReport:
    """Row-wise outcome of the fixed-step convergence inequalities."""

    step_ok: tuple
    rate_ok: tuple
    beta: float

    @property
    def passed(self):
        return all(self.step_ok) and all(self.rate_ok)

    @property
    def first_failure(self):
        for k, (a, b) in enumerate(zip(self.step_ok, self.rate_ok)):
            if not (a and b):
                return k
        return None


def rate_bound_check(trace, L, grid=None, rtol=1e-10):
    """Check the fixed-step inequalities row by row.

    * ``||f_{k+1} - f_k||^2 <= (2/L) (J_k - J_{k+1})``
    * ``J_k - J_* <= 2 L beta^2 / k`` for ``k >= 1``, with ``J_*`` the last value
      and ``beta = max_k ||f_k - f_final||`` standing in for the distance to the
      set of quasi-solutions.

    Norms are the spatial ``L2`` norm; ``grid`` defaults to the grid of the
    final iterate.
    """
    if trace.fixed_alpha is None:
        raise PreconditionError("rate bounds apply to fixed-step runs only")
    grid = grid or trace.final.grid
    w = grid.weights
    it = np.asarray(trace.iterates)
    J = trace.column("J")
    norm = lambda v: float(np.sqrt(np.dot(w * v, v)))
    beta = max((norm(fk - it[-1]) for fk in it), default=0.0)
    slack = rtol * max(1.0, float(np.max(np.abs(J)))) if len(J) else 0.0
    step_ok, rate_ok = [], []
    J_star = J[-1]
    for k in range(len(J)):
        if k + 1 < len(J):
            step_ok.append(norm(it[k + 1] - it[k]) ** 2 <= 2.0 / L * (J[k] - J[k + 1]) + slack)
        else:
            step_ok.append(True)
        rate_ok.append(k == 0 or (-slack <= J[k] - J_star <= 2.0 * L * beta ** 2 / k + slack))
    return RateReport(tuple(step_ok), tuple(rate_ok), beta)
