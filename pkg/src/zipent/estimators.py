"""scikit-learn style wrappers around the entropy and optimization routines.

``fit`` takes the dynamical system itself (a measure, a sub-zip shift or an
alphabet pair) in place of a data matrix; fitted quantities end in ``_``.
"""

from __future__ import annotations

import numpy as np
from sklearn.base import BaseEstimator
from sklearn.utils.validation import check_is_fitted

from .entropy import DEFAULT_DEPTH, DEFAULT_N_MAX, square_measure_entropy, square_topological_entropy
from .validation import check_int, check_measure, check_pair, check_positive, check_seed, check_sub
from .variational import maximize_square_entropy


class ZipShiftEntropyEstimator(BaseEstimator):
    """Forward, backward and square measure entropy by partition refinement."""

    def __init__(self, depth=DEFAULT_DEPTH):
        self.depth = depth

    def fit(self, X, y=None):
        mu = check_measure(X)
        depth = check_int(self.depth, "depth", lo=1)
        report = square_measure_entropy(mu, depth)
        self.report_ = report
        self.h_plus_ = report.h_plus
        self.h_minus_ = report.h_minus
        self.h_square_ = report.h_square
        return self

    def score(self, X=None, y=None):
        check_is_fitted(self, "h_square_")
        return self.h_square_


class TopologicalEntropyEstimator(BaseEstimator):
    """Topological entropy of each side and their geometric mean."""

    def __init__(self, n_max=DEFAULT_N_MAX, method=None):
        self.n_max = n_max
        self.method = method

    def fit(self, X, y=None):
        sub = check_sub(X)
        n_max = check_int(self.n_max, "n_max", lo=2)
        result = square_topological_entropy(sub, n_max, self.method)
        self.h_s_ = result.h_s
        self.h_z_ = result.h_z
        self.h_square_ = result.h_square
        self.method_ = result.method
        return self

    def score(self, X=None, y=None):
        check_is_fitted(self, "h_square_")
        return self.h_square_


class SquareEntropyMaximizer(BaseEstimator):
    """Multi-start mirror ascent for the square entropy over invariant product measures."""

    def __init__(self, n_starts=20, step=0.1, max_iter=5000, tol=1e-6, random_state=0, oracle=True):
        self.n_starts = n_starts
        self.step = step
        self.max_iter = max_iter
        self.tol = tol
        self.random_state = random_state
        self.oracle = oracle

    def fit(self, X, y=None):
        pair = check_pair(X)
        report = maximize_square_entropy(
            pair,
            starts=check_int(self.n_starts, "n_starts", lo=1),
            step=check_positive(self.step, "step"),
            iters=check_int(self.max_iter, "max_iter", lo=1),
            tol=check_positive(self.tol, "tol"),
            seed=check_seed(self.random_state),
            oracle=bool(self.oracle),
        )
        self.report_ = report
        self.value_ = report.value
        self.argmax_ = np.asarray(report.argmax)
        self.oracle_value_ = report.oracle_value
        self.start_values_ = np.array([r["value"] for r in report.per_start])
        self.n_iter_ = np.array([r["iterations"] for r in report.per_start])
        return self

    def score(self, X=None, y=None):
        check_is_fitted(self, "value_")
        return self.value_
