import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from dynheat import (
    BoundarySourcePair,
    PreconditionError,
    ProblemSetup,
    SolverInstabilityError,
    SpatialGrid,
    TimeGrid,
    conservation_residual,
    default_setup,
    solve_forward,
    stability_gap,
)
from dynheat.forward import source_norm_sq
from dynheat.refinement import forward_errors, observed_order, random_smooth

from oracles import parabolic_final, relative_error, restrict


def parabola(s):
    x = s.space.nodes
    return x * (1 - x)


def test_zero_source_gives_zero(coarse_setup):
    assert not np.any(solve_forward(coarse_setup, np.zeros(coarse_setup.space.n_nodes)).values)


@pytest.mark.parametrize("c", [1.0, -2.5])
def test_constant_state_persists(c):
    s = ProblemSetup.build(SpatialGrid(1.0, 32), TimeGrid(1.0, 64), y0=c)
    np.testing.assert_allclose(solve_forward(s).values, c, rtol=0, atol=1e-13)


def test_initial_state_exact():
    s = ProblemSetup.build(SpatialGrid(1.0, 32), TimeGrid(1.0, 64), y0=lambda x: np.cos(x))
    traj = solve_forward(s, parabola(s))
    np.testing.assert_array_equal(traj.initial.values, s.y0.values)
    assert len(traj) == 65


def test_trace_identity_structural(coarse_setup):
    traj = solve_forward(coarse_setup, parabola(coarse_setup))
    for k in (0, 10, len(traj) - 1):
        state = traj[k]
        assert state.left == state.values[0] and state.right == state.values[-1]


def test_matches_fine_grid_oracle(reference_setup):
    y = solve_forward(reference_setup, parabola(reference_setup)).final.values
    ref = restrict(parabolic_final(), reference_setup.space)
    assert relative_error(y, ref) <= 1e-4


def test_grid_convergence_order():
    x_src = lambda x: x * (1 - x)
    errs = forward_errors([16, 32, 64, 128], x_src, reference_cells=1024)
    assert observed_order([1 / n for n in (16, 32, 64, 128)], errs) >= 1.9


def test_linearity(coarse_setup, rng):
    f1, f2 = random_smooth(coarse_setup.space, rng), random_smooth(coarse_setup.space, rng)
    y = lambda f: solve_forward(coarse_setup, f, homogeneous=True).values
    lhs, rhs = y(0.7 * f1 - 1.3 * f2), 0.7 * y(f1) - 1.3 * y(f2)
    assert np.max(np.abs(lhs - rhs)) <= 1e-10 * np.max(np.abs(rhs))


def test_homogeneous_drops_data():
    g = TimeGrid(1.0, 16)
    s = ProblemSetup.build(SpatialGrid(1.0, 8), g, y0=1.0,
                           boundary_source=BoundarySourcePair.from_functions(g, np.sin, np.cos))
    assert not np.any(solve_forward(s, homogeneous=True).values)


def test_boundary_source_feeds_heat():
    g = TimeGrid(1.0, 64)
    pair = BoundarySourcePair(g, np.ones(65), np.zeros(65))
    s = ProblemSetup.build(SpatialGrid(1.0, 32), g, boundary_source=pair)
    y = solve_forward(s).values
    heat = y @ s.space.product_weights
    assert heat[-1] == pytest.approx(1.0, rel=1e-12)


def test_potentials_damp():
    space, time = SpatialGrid(1.0, 32), TimeGrid(1.0, 64)
    plain = ProblemSetup.build(space, time, y0=1.0)
    damped = ProblemSetup.build(space, time, y0=1.0, a=2.0, b_left=1.0, b_right=1.0)
    assert np.all(solve_forward(damped).final.values < solve_forward(plain).final.values)


def test_instability_names_step():
    space, time = SpatialGrid(1.0, 8), TimeGrid(1.0, 4)
    # amplification (1 + 0.95) / (1 - 0.95) per step overflows the huge initial state
    s = ProblemSetup.build(space, time, a=-7.6, y0=1e307)
    with pytest.raises(SolverInstabilityError) as info, np.errstate(over="ignore", invalid="ignore"):
        solve_forward(s)
    assert 1 <= info.value.step <= 2
    assert f"step {info.value.step}" in str(info.value)


def test_conservation_constant_state():
    s = ProblemSetup.build(SpatialGrid(1.0, 32), TimeGrid(1.0, 64), y0=3.0)
    assert conservation_residual(solve_forward(s), s) <= 1e-10


def test_conservation_parabola(reference_setup):
    f = parabola(reference_setup)
    assert conservation_residual(solve_forward(reference_setup, f), reference_setup, f) <= 1e-6


def test_conservation_under_time_step_halving():
    # the residual sits at rounding level, so the halving trend is checked against that floor
    res = []
    for steps in (64, 128):
        s = default_setup(64, steps)
        f = parabola(s)
        res.append(conservation_residual(solve_forward(s, f), s, f))
    assert res[1] <= max(res[0] / 3.0, 1e-13)


def test_conservation_precondition():
    s = ProblemSetup.build(SpatialGrid(1.0, 8), TimeGrid(1.0, 4), a=1.0)
    with pytest.raises(PreconditionError):
        conservation_residual(solve_forward(s), s)


def test_stability_equal_sources(coarse_setup):
    f = parabola(coarse_setup)
    assert stability_gap(coarse_setup, f, f) == (0.0, 0.0)


def test_stability_multiplier(coarse_setup):
    f = np.ones(coarse_setup.space.n_nodes)
    _, rhs = stability_gap(coarse_setup, f, 0 * f)
    assert rhs / source_norm_sq(coarse_setup, f) == pytest.approx(np.e, rel=1e-12)


def test_stability_parabola(reference_setup):
    lhs, rhs = stability_gap(reference_setup, parabola(reference_setup), np.zeros(257))
    assert lhs < rhs


@given(seed=st.integers(0, 2**32 - 1))
@settings(max_examples=20, deadline=None)
def test_gronwall_random_pairs(seed):
    s = default_setup(32, 64)
    rng = np.random.default_rng(seed)
    lhs, rhs = stability_gap(s, random_smooth(s.space, rng), random_smooth(s.space, rng))
    assert lhs <= rhs * (1 + 1e-6)


def test_trajectory_csv(tmp_path):
    s = default_setup(8, 4)
    path = tmp_path / "traj.csv"
    solve_forward(s, parabola(s)).to_csv(path)
    lines = path.read_text().splitlines()
    assert lines[0] == "t,x,value" and len(lines) == 1 + 5 * 9
