"""scikit-learn style front end.

:class:`LandweberSourceEstimator` fits a spatial source to an observed
final-time state; :class:`FinalTimeMap` is the input-output map as a
transformer, so sources can be pushed through pipelines.
"""
import numpy as np
from sklearn.base import BaseEstimator, TransformerMixin
from sklearn.utils.validation import check_is_fitted

from .fields import SpaceSource
from .forward import solve_forward
from .landweber import LandweberConfig, Observation, run
from .objective import evaluate
from .validation import check_setup, check_source, check_sources_2d, check_state

__all__ = ["LandweberSourceEstimator", "FinalTimeMap"]


class LandweberSourceEstimator(BaseEstimator):
    """Recover ``f(x)`` from a noisy final-time state by Landweber iteration.

    Parameters
    ----------
    setup : ProblemSetup, optional
        Known data of the direct problem. Defaults to ``default_setup()``.
    epsilon : float
        Tikhonov weight.
    tol : float
        Stop once ``J_eps(f_k) < tol``.
    max_iter : int
    step_mode : {"adaptive", "lipschitz"} or float
    f0 : array_like, optional
        Initial iterate; zero when omitted.
    admissible_radius : float, optional
        Only monitored: a warning is logged when an iterate leaves the ball.

    Attributes
    ----------
    source_ : ndarray of shape (n_nodes,)
    trace_ : ReconstructionTrace
    n_iter_ : int
    stop_reason_ : str
    setup_ : ProblemSetup
    """

    def __init__(self, setup=None, epsilon=1e-6, tol=1e-6, max_iter=1000, step_mode="adaptive",
                 f0=None, admissible_radius=None):
        self.setup = setup
        self.epsilon = epsilon
        self.tol = tol
        self.max_iter = max_iter
        self.step_mode = step_mode
        self.f0 = f0
        self.admissible_radius = admissible_radius

    def _config(self, setup):
        return LandweberConfig(
            f0=check_source(self.f0, setup, allow_none=True),
            e_J=self.tol,
            max_iter=self.max_iter,
            step_mode=self.step_mode,
            epsilon=self.epsilon,
            admissible_radius=self.admissible_radius,
        )

    def fit(self, X, y=None, f_true=None, clean=None):
        """Fit to the observed final state ``X`` (one value per node).

        ``f_true`` and ``clean`` are optional and only fill the error columns
        of ``trace_``.
        """
        setup = check_setup(self.setup)
        if isinstance(X, Observation):
            obs = X
        else:
            clean_state = None if clean is None else check_state(clean, setup)
            obs = Observation(check_state(X, setup), clean=clean_state)
        truth = check_source(f_true, setup, allow_none=True)
        trace = run(setup, obs, self._config(setup), truth=truth)
        self.setup_ = setup
        self.trace_ = trace
        self.source_ = np.array(trace.final.values)
        self.n_iter_ = trace.stop_iteration
        self.stop_reason_ = trace.stop_reason
        return self

    def predict(self, X=None):
        """Final-time state produced by the fitted source (``X`` is ignored)."""
        check_is_fitted(self, "source_")
        return np.array(solve_forward(self.setup_, self.source_).final.values)

    def score(self, X, y=None):
        """Negative Tikhonov functional of the fitted source against ``X``."""
        check_is_fitted(self, "source_")
        state = check_state(getattr(X, "data", X), self.setup_)
        return -evaluate(self.setup_, self.source_, state, self.epsilon)


class FinalTimeMap(TransformerMixin, BaseEstimator):
    """Map each row of sources to its final-time state.

    Parameters
    ----------
    setup : ProblemSetup, optional
    homogeneous : bool
        Use zero initial data and no boundary sources (the input-output map).
    """

    def __init__(self, setup=None, homogeneous=True):
        self.setup = setup
        self.homogeneous = homogeneous

    def fit(self, X, y=None):
        setup = check_setup(self.setup)
        X = check_sources_2d(X, setup)
        self.setup_ = setup
        self.n_features_in_ = X.shape[1]
        return self

    def transform(self, X):
        check_is_fitted(self, "setup_")
        X = check_sources_2d(X, self.setup_)
        out = np.empty_like(X)
        for i, row in enumerate(X):
            out[i] = solve_forward(self.setup_, row, homogeneous=self.homogeneous).final.values
        return out
