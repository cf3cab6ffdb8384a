import numpy as np
import pytest
from sklearn.base import clone
from sklearn.exceptions import NotFittedError

from dynheat import (
    FinalTimeMap,
    GridMismatchError,
    LandweberSourceEstimator,
    default_setup,
    input_output,
    l2_space_norm,
    make_observation,
)


@pytest.fixture(scope="module")
def setup():
    return default_setup(32, 64)


def test_params_round_trip(setup):
    est = LandweberSourceEstimator(setup=setup, epsilon=1e-8, max_iter=7)
    params = est.get_params()
    assert params["epsilon"] == 1e-8 and params["max_iter"] == 7
    twin = clone(est)
    assert twin.get_params()["max_iter"] == 7 and twin is not est


def test_fit_predict_score(setup):
    x = setup.space.nodes
    f = x * (1 - x)
    obs = make_observation(setup, f, 0.01, seed=0, mode="paper")
    est = LandweberSourceEstimator(setup=setup).fit(obs, f_true=f)
    assert est.stop_reason_ == "threshold" and est.n_iter_ == est.trace_.stop_iteration
    assert est.source_.shape == (setup.space.n_nodes,)
    assert est.predict().shape == (setup.space.n_nodes,)
    assert est.score(obs) == pytest.approx(-est.trace_.rows[-1].J, rel=1e-10)


def test_fit_on_plain_array(setup):
    x = setup.space.nodes
    data = input_output(setup, np.sin(np.pi * x)).values
    est = LandweberSourceEstimator(setup=setup, tol=1e-10, epsilon=1e-10, max_iter=5).fit(data, clean=data)
    last = est.trace_.rows[-1]
    reg = 1e-10 * l2_space_norm(est.source_, setup.space) ** 2
    assert last.e == pytest.approx(2 * last.J - reg, rel=1e-9)


def test_not_fitted(setup):
    with pytest.raises(NotFittedError):
        LandweberSourceEstimator(setup=setup).predict()


def test_wrong_length(setup):
    with pytest.raises(GridMismatchError):
        LandweberSourceEstimator(setup=setup).fit(np.zeros(5))


def test_final_time_map(setup, rng):
    X = rng.standard_normal((3, setup.space.n_nodes))
    Y = FinalTimeMap(setup=setup).fit_transform(X)
    for row, out in zip(X, Y):
        np.testing.assert_array_equal(out, input_output(setup, row).values)


def test_final_time_map_checks_width(setup):
    with pytest.raises(GridMismatchError):
        FinalTimeMap(setup=setup).fit(np.zeros((2, 4)))
