"""
scikit-learn surface for max-affine regression.
"""

import logging

import numpy as np
from sklearn.base import BaseEstimator, RegressorMixin
from sklearn.utils.validation import check_array, check_is_fitted, check_X_y

from .am import am_run, rand_am_baseline
from .covariates import Dataset
from .exceptions import InvalidInputError
from .initialization import full_init
from .model import append_ones, predict
from .numerics import RngStream

logger = logging.getLogger(__name__)

INIT_METHODS = ('spectral', 'random')


class MaxAffineRegressor(RegressorMixin, BaseEstimator):
    """
    Fit y ~ max_j (<theta_j, x> + b_j) by alternating minimization.

    Parameters:
        n_pieces (int): Number of affine pieces k
        n_iter (int): AM iterations after initialization
        n_candidates (int): Random-search candidates (or random restarts when init='random')
        init (str): 'spectral' for spectral + random search, 'random' for repeated random starts
        random_state (int): Seed of the random stream
    """

    def __init__(self, n_pieces=3, n_iter=50, n_candidates=70, init='spectral', random_state=0):
        self.n_pieces = n_pieces
        self.n_iter = n_iter
        self.n_candidates = n_candidates
        self.init = init
        self.random_state = random_state

    def _check_params(self):
        if self.init not in INIT_METHODS:
            raise InvalidInputError(f"init must be one of {INIT_METHODS}, got '{self.init}'")
        for name in ('n_pieces', 'n_candidates'):
            if int(getattr(self, name)) < 1:
                raise InvalidInputError(f"{name} must be at least 1, got {getattr(self, name)}")
        if int(self.n_iter) < 0:
            raise InvalidInputError(f"n_iter must be non-negative, got {self.n_iter}")

    def fit(self, X, y):
        self._check_params()
        X, y = check_X_y(X, y, dtype=float, y_numeric=True)
        data = Dataset.from_arrays(X, y)
        stream = RngStream(0 if self.random_state is None else int(self.random_state))

        if self.init == 'spectral':
            start = full_init(data, self.n_pieces, self.n_candidates, stream.child('init'))
        else:
            start = rand_am_baseline(data, self.n_pieces, self.n_candidates, self.n_iter, stream.child('init')).params

        trace = am_run(start, data.Xi, data.y, self.n_iter)
        self.params_ = trace.final
        self.coef_ = np.array(self.params_.thetas)
        self.intercept_ = np.array(self.params_.intercepts)
        self.objective_ = list(trace.objective)
        self.n_features_in_ = X.shape[1]
        logger.info(f"Fitted {self.n_pieces} pieces on n={data.n}, d={data.d}: objective {self.objective_[-1]:.6g}")
        return self

    def predict(self, X):
        check_is_fitted(self, 'params_')
        X = check_array(X, dtype=float)
        if X.shape[1] != self.n_features_in_:
            raise InvalidInputError(f"X has {X.shape[1]} features, the model was fitted with {self.n_features_in_}")
        return predict(self.params_, append_ones(X))
