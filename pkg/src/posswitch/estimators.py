"""scikit-learn style wrappers around the functional API.

``fit`` takes the matrix set describing the switching system (a MatrixSet,
or an array-like stack of square matrices that becomes an explicit set).
Fitted attributes carry a trailing underscore; hyper-parameters round-trip
through ``get_params``/``set_params`` and ``sklearn.base.clone``.
"""

import numpy as np
from sklearn.base import BaseEstimator
from sklearn.utils.validation import check_array, check_is_fitted

from ._validation import NONNEGATIVE, POSITIVE
from .exceptions import NonPositiveVector
from .matset import DEFAULT_LIMIT, MatrixSet, make_explicit
from .oracle import DEFAULT_BUDGET
from .spectral import analyze
from .trajectory import DEFAULT_OBJECTIVES, greedy_trajectory


def check_matrix_set(X, mode=None):
    """Coerce ``X`` to a MatrixSet.

    Array-likes of shape ``(K, N, N)`` (or a single ``(N, N)`` matrix)
    become explicit sets; the mode defaults to positive when every entry is
    strictly positive and non-negative otherwise.
    """
    if isinstance(X, MatrixSet):
        return X
    arr = np.asarray(X, dtype=float)
    if arr.ndim == 2:
        arr = arr[None]
    if arr.ndim != 3:
        raise ValueError(f"expected a MatrixSet or a (K, N, N) stack, got shape {arr.shape}")
    if mode is None:
        mode = POSITIVE if np.all(arr > 0) else NONNEGATIVE
    return make_explicit(list(arr), mode)


class SwitchingSystemAnalyzer(BaseEstimator):
    """Decide stability and stabilizability of ``x(k+1) = A(k) x(k)``.

    Attributes
    ----------
    report_ : AnalysisReport
    rho_max_, rho_min_ : float
    stable_, stabilizable_ : bool
    hset_status_ : str
    n_features_in_ : int
        State dimension.
    """

    def __init__(self, method="enumerate", oracle_depth=None, norm="inf",
                 n_samples=1000, seed=0, limit=DEFAULT_LIMIT, budget=DEFAULT_BUDGET):
        self.method = method
        self.oracle_depth = oracle_depth
        self.norm = norm
        self.n_samples = n_samples
        self.seed = seed
        self.limit = limit
        self.budget = budget

    def fit(self, X, y=None):
        S = check_matrix_set(X)
        self.report_ = analyze(S, method=self.method, oracle_depth=self.oracle_depth,
                               norm=self.norm, n_samples=self.n_samples, seed=self.seed,
                               limit=self.limit, budget=self.budget)
        self.rho_max_ = self.report_.rho_max
        self.rho_min_ = self.report_.rho_min
        self.stable_ = self.report_.stable
        self.stabilizable_ = self.report_.stabilizable
        self.hset_status_ = self.report_.hset_status
        self.n_features_in_ = S.shape[1]
        return self

    def predict(self, X=None):
        """``[stable, stabilizable]`` verdicts of the fitted system."""
        check_is_fitted(self, "report_")
        return np.array([self.stable_, self.stabilizable_])


class ExtremalTrajectory(BaseEstimator):
    """Greedy extremal trajectories of a fitted switching system.

    ``transform`` maps each row of ``X`` (a strictly positive initial
    state) to the state reached after ``n_steps`` greedy steps.
    """

    def __init__(self, n_steps=10, direction="max", normalize=False,
                 objectives=DEFAULT_OBJECTIVES, limit=DEFAULT_LIMIT):
        self.n_steps = n_steps
        self.direction = direction
        self.normalize = normalize
        self.objectives = objectives
        self.limit = limit

    def fit(self, X, y=None):
        self.set_ = check_matrix_set(X)
        if not self.set_.is_square:
            raise ValueError(f"set members have shape {self.set_.shape}, expected square")
        self.n_features_in_ = self.set_.shape[1]
        return self

    def trajectory(self, x0):
        check_is_fitted(self, "set_")
        return greedy_trajectory(self.set_, x0, self.n_steps, self.direction,
                                 objectives=self.objectives, normalize=self.normalize,
                                 limit=self.limit)

    def transform(self, X):
        check_is_fitted(self, "set_")
        X = check_array(X, dtype=float)
        if X.shape[1] != self.n_features_in_:
            raise ValueError(
                f"X has {X.shape[1]} features, expected {self.n_features_in_}"
            )
        if np.any(X <= 0):
            raise NonPositiveVector("initial states must be strictly positive")
        out = np.empty_like(X)
        for i, x0 in enumerate(X):
            out[i] = self.trajectory(x0).raw_states()[-1]
        return out
