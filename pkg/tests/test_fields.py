import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from dynheat import (
    BoundarySourcePair,
    Observation,
    GridMismatchError,
    ProductState,
    SpaceSource,
    SpatialGrid,
    TimeGrid,
    product_inner,
    product_norm,
    spacetime_inner,
)
from dynheat.fields import l2_space_norm, read_space_csv, trapezoid_in_time, write_space_csv

GRID = SpatialGrid(1.0, 16)
vectors = arrays(np.float64, GRID.n_nodes, elements=st.floats(-1e3, 1e3))
scalars = st.floats(-1e3, 1e3)


def test_grid_geometry():
    g = SpatialGrid(2.0, 8)
    assert g.dx == 0.25 and g.n_nodes == 9
    assert g.nodes[0] == 0.0 and g.nodes[-1] == 2.0
    assert np.isclose(g.weights.sum(), 2.0)
    assert np.isclose(g.product_weights.sum(), 4.0)


@pytest.mark.parametrize("args", [(0.0, 8), (1.0, 3), (-1.0, 8)])
def test_bad_spatial_grid(args):
    with pytest.raises(ValueError):
        SpatialGrid(*args)


def test_bad_time_grid():
    with pytest.raises(ValueError):
        TimeGrid(1.0, 1)


def test_constant_state_norm():
    s = ProductState(GRID, np.full(GRID.n_nodes, 2.0))
    assert np.isclose(product_norm(s), np.sqrt(4.0 + 4.0 + 4.0))


def test_parabola_quadrature_converges():
    errs = []
    for n in (16, 32, 64):
        g = SpatialGrid(1.0, n)
        s = ProductState.from_function(g, lambda x: x * (1 - x))
        errs.append(abs(product_inner(s, s) - 1.0 / 30.0))
    assert errs[1] < errs[0] / 3.5 and errs[2] < errs[1] / 3.5


def test_boundary_views():
    s = ProductState.from_function(GRID, lambda x: x)
    assert s.left == 0.0 and s.right == 1.0
    assert s.interior[0] == s.left and s.interior[-1] == s.right


def test_states_are_immutable():
    s = ProductState.zeros(GRID)
    with pytest.raises(ValueError):
        s.values[0] = 1.0


def test_grid_mismatch():
    other = SpatialGrid(1.0, 8)
    with pytest.raises(GridMismatchError):
        product_inner(ProductState.zeros(GRID), ProductState.zeros(other))
    with pytest.raises(GridMismatchError):
        ProductState(GRID, np.zeros(5))


def test_nonfinite_observation_rejected():
    v = np.zeros(GRID.n_nodes)
    v[3] = np.nan
    with pytest.raises(ValueError):
        Observation(ProductState(GRID, v))


def test_source_norm_ignores_boundary_weight():
    f = SpaceSource(GRID, np.ones(GRID.n_nodes))
    assert np.isclose(l2_space_norm(f), 1.0)


def test_time_trapezoid_and_spacetime():
    t = TimeGrid(1.0, 10)
    assert np.isclose(trapezoid_in_time(t.times, t), 0.5)
    u = np.ones((t.n_steps + 1, GRID.n_nodes))
    assert np.isclose(spacetime_inner(u, u, GRID, t), 3.0)


def test_boundary_source_pair_shapes():
    t = TimeGrid(1.0, 4)
    pair = BoundarySourcePair.from_functions(t, np.sin, np.cos)
    assert pair.g_left.shape == (5,)
    with pytest.raises(ValueError):
        BoundarySourcePair(t, np.zeros(3), np.zeros(5))


def test_space_csv_round_trip(tmp_path):
    path = tmp_path / "f.csv"
    values = np.sin(GRID.nodes)
    write_space_csv(path, GRID.nodes, values)
    assert path.read_text().splitlines()[0] == "x,value"
    x, back = read_space_csv(path)
    np.testing.assert_array_equal(x, GRID.nodes)
    np.testing.assert_array_equal(back, values)


@given(vectors, vectors)
def test_inner_symmetric(u, v):
    assert product_inner(u, v, GRID) == pytest.approx(product_inner(v, u, GRID), rel=1e-12, abs=1e-9)


@given(vectors, vectors, vectors, scalars, scalars)
@settings(max_examples=50)
def test_inner_bilinear(u, v, w, a, b):
    lhs = product_inner(a * u + b * v, w, GRID)
    rhs = a * product_inner(u, w, GRID) + b * product_inner(v, w, GRID)
    scale = (abs(a) * product_norm(u, GRID) + abs(b) * product_norm(v, GRID) + 1.0) * (product_norm(w, GRID) + 1.0)
    assert abs(lhs - rhs) <= 1e-10 * scale


@given(vectors, vectors)
def test_cauchy_schwarz(u, v):
    assert abs(product_inner(u, v, GRID)) <= product_norm(u, GRID) * product_norm(v, GRID) * (1 + 1e-12) + 1e-12


@given(vectors)
def test_norm_positive(u):
    n = product_norm(u, GRID)
    assert n >= 0.0
    if not np.any(u):
        assert n == 0.0
    elif np.max(np.abs(u)) > 1e-100:
        assert n > 0.0
