"""Invariant suites run by ``dynheat selftest``.

Each check returns ``(value, tolerance)``; it passes when ``value <= tolerance``.
Tolerances of discretisation-dependent checks are quoted at 256 cells and
scaled by ``(256 / n_cells)^2``, the observed second-order behaviour.
"""
from dataclasses import dataclass

import numpy as np

from .adjoint import adjoint_identity_gap, solve_adjoint
from .fields import ProductState, product_inner, product_norm
from .forward import conservation_residual, solve_forward, stability_gap
from .landweber import LandweberConfig, make_observation, rate_bound_check, run
from .objective import evaluate, gradient, lipschitz_constant, monotonicity_gap
from .refinement import fd_directional, random_smooth, time_varying_modulation

__all__ = ["CheckResult", "SUITES", "run_suites", "format_matrix"]

REFERENCE_CELLS = 256


@dataclass
class CheckResult:
    suite: str
    name: str
    value: float
    tol: float
    error: str = ""

    @property
    def passed(self):
        return not self.error and bool(np.isfinite(self.value)) and self.value <= self.tol


def _scale(setup):
    return max(1.0, (REFERENCE_CELLS / setup.space.n_cells) ** 2)


def _rng():
    return np.random.default_rng(20240611)


# field-core

def check_inner_symmetry(setup):
    rng = _rng()
    worst = 0.0
    for _ in range(10):
        u, v = (rng.standard_normal(setup.space.n_nodes) for _ in range(2))
        uv = product_inner(u, v, setup.space)
        worst = max(worst, abs(uv - product_inner(v, u, setup.space)),
                    max(0.0, abs(uv) - product_norm(u, setup.space) * product_norm(v, setup.space)))
    return worst, 1e-12


def check_quadrature(setup):
    x = setup.space.nodes
    s = ProductState(setup.space, x * (1 - x))
    return abs(product_inner(s, s) - 1.0 / 30.0), setup.space.dx ** 2


# forward-solver

def check_forward_zero(setup):
    return float(np.max(np.abs(solve_forward(setup, np.zeros(setup.space.n_nodes), homogeneous=True).values))), 0.0


def check_linearity(setup):
    rng = _rng()
    f1, f2 = random_smooth(setup.space, rng), random_smooth(setup.space, rng)
    y = lambda f: solve_forward(setup, f, homogeneous=True).values
    lhs = y(2.0 * f1 - 3.0 * f2)
    rhs = 2.0 * y(f1) - 3.0 * y(f2)
    return float(np.max(np.abs(lhs - rhs)) / np.max(np.abs(rhs))), 1e-10


def check_conservation(setup):
    x = setup.space.nodes
    f = x * (1 - x)
    return conservation_residual(solve_forward(setup, f, homogeneous=True), setup, f), 1e-6


def check_gronwall(setup):
    rng = _rng()
    worst = 0.0
    for _ in range(5):
        lhs, rhs = stability_gap(setup, random_smooth(setup.space, rng), random_smooth(setup.space, rng))
        worst = max(worst, lhs / rhs)
    return worst, 1.05


# adjoint-solver

def check_adjoint_identity(setup):
    rng = _rng()
    worst = 0.0
    for _ in range(5):
        worst = max(worst, adjoint_identity_gap(setup, random_smooth(setup.space, rng),
                                                random_smooth(setup.space, rng, modes=3)))
    return worst, 1e-4 * _scale(setup)


def check_adjoint_identity_time_varying(setup):
    varied = setup.with_time_modulation(time_varying_modulation(setup.time.T))
    return check_adjoint_identity(varied)


def check_adjoint_conservation(setup):
    x = setup.space.nodes
    phi = solve_adjoint(setup, 1.0 + np.cos(np.pi * x) + x ** 2).values
    heat = phi @ setup.space.product_weights
    return float(np.max(np.abs(heat - heat[-1])) / abs(heat[-1])), 1e-8


def check_adjoint_decay(setup):
    x = setup.space.nodes
    phi = solve_adjoint(setup, np.cos(3 * np.pi * x) + x).values
    norms = np.sqrt((phi * phi) @ setup.space.product_weights)
    growth = np.exp(setup.potential_bound * (setup.time.T - setup.time.times))
    return float(np.max(norms / (growth * norms[-1]))), 1.05


# objective

def _example1(setup, p=0.0):
    x = setup.space.nodes
    return x * (1 - x), make_observation(setup, x * (1 - x), p, seed=0)


def check_gradient_fd(setup):
    rng = _rng()
    truth, obs = _example1(setup, 0.01)
    worst = 0.0
    for _ in range(3):
        f = random_smooth(setup.space, rng)
        v = random_smooth(setup.space, rng)
        fd = fd_directional(lambda g: evaluate(setup, g, obs, 0.0), f, v)
        adj = float(np.dot(setup.space.weights * gradient(setup, f, obs, 0.0).values.values, v))
        worst = max(worst, abs(adj - fd) / abs(fd))
    return worst, 1e-3 * _scale(setup)


def check_monotonicity(setup):
    rng = _rng()
    truth, obs = _example1(setup, 0.01)
    worst = 0.0
    for _ in range(3):
        lhs, rhs = monotonicity_gap(setup, truth, random_smooth(setup.space, rng), obs, 0.0)
        worst = max(worst, abs(lhs - rhs) / rhs)
    return worst, 1e-3 * _scale(setup)


def check_lipschitz(setup):
    rng = _rng()
    truth, obs = _example1(setup, 0.0)
    bound = np.sqrt(setup.time.T) * lipschitz_constant(setup)
    w = setup.space.weights
    worst = 0.0
    for _ in range(3):
        f, df = random_smooth(setup.space, rng), random_smooth(setup.space, rng)
        g1 = gradient(setup, f + df, obs, 0.0).values.values
        g0 = gradient(setup, f, obs, 0.0).values.values
        dF = np.sqrt(setup.time.weights @ ((setup.r * df) ** 2 @ w))
        worst = max(worst, np.sqrt(np.dot(w * (g1 - g0), g1 - g0)) / (bound * dF))
    return worst, 1.05


# landweber

def check_landweber_example1(setup):
    x = setup.space.nodes
    truth = x * (1 - x)
    obs = make_observation(setup, truth, 0.01, seed=0, mode="paper")
    trace = run(setup, obs, LandweberConfig(e_J=1e-6, epsilon=1e-6, max_iter=50), truth=truth)
    J = trace.column("J")
    if np.any(np.diff(J) > 0):
        return float("inf"), 0.0
    if trace.stop_iteration > 6:
        return float("inf"), 0.0
    return trace.rows[-1].E, 5e-2


def check_fixed_step_rates(setup):
    x = setup.space.nodes
    truth = x * (1 - x)
    obs = make_observation(setup, truth, 0.01, seed=0)
    trace = run(setup, obs, LandweberConfig(e_J=1e-12, epsilon=1e-6, max_iter=15, step_mode="lipschitz"))
    report = rate_bound_check(trace, lipschitz_constant(setup))
    return (0.0 if report.passed else 1.0), 0.0


def check_determinism(setup):
    x = setup.space.nodes
    truth = np.sin(np.pi * x)
    cfg = LandweberConfig(e_J=1e-8, epsilon=1e-8, max_iter=5)
    texts = [run(setup, make_observation(setup, truth, 0.03, seed=7), cfg, truth).to_csv_text() for _ in range(2)]
    return (0.0 if texts[0] == texts[1] else 1.0), 0.0


SUITES = {
    "field-core": [check_inner_symmetry, check_quadrature],
    "forward-solver": [check_forward_zero, check_linearity, check_conservation, check_gronwall],
    "adjoint-solver": [check_adjoint_identity, check_adjoint_identity_time_varying,
                       check_adjoint_conservation, check_adjoint_decay],
    "objective": [check_gradient_fd, check_monotonicity, check_lipschitz],
    "landweber": [check_landweber_example1, check_fixed_step_rates, check_determinism],
}


def run_suites(setup, suites=None):
    results = []
    for suite in suites or SUITES:
        for check in SUITES[suite]:
            name = check.__name__.removeprefix("check_")
            try:
                value, tol = check(setup)
                results.append(CheckResult(suite, name, float(value), float(tol)))
            except Exception as exc:  # a crashing check is a failed check
                results.append(CheckResult(suite, name, float("nan"), float("nan"), f"{type(exc).__name__}: {exc}"))
    return results


def format_matrix(results):
    lines = [f"{'suite':<16} {'check':<32} {'result':<6} {'value':>12} {'tol':>12}"]
    for r in results:
        status = "PASS" if r.passed else "FAIL"
        line = f"{r.suite:<16} {r.name:<32} {status:<6} {r.value:>12.3e} {r.tol:>12.3e}"
        if r.error:
            line += f"  {r.error}"
        lines.append(line)
    return "\n".join(lines)
