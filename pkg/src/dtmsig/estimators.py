"""scikit-learn style front ends for the DTM, its signature and the isomorphism test."""

from __future__ import annotations

import numpy as np
from sklearn.base import BaseEstimator, TransformerMixin
from sklearn.utils.validation import check_array, check_is_fitted

from .dtm import _dtm_sorted, _canonical_order, check_mass, dtm_values
from .isomorphism_test import TestParams, run_test
from .measure_space import FiniteMeasureSpace
from .signature import DTMCache
from .wasserstein1d import w1


def _as_space(X, metric: str, sample_weight=None) -> FiniteMeasureSpace:
    if isinstance(X, FiniteMeasureSpace):
        if sample_weight is not None:
            raise ValueError("sample_weight cannot be combined with a FiniteMeasureSpace input")
        return X
    X = check_array(X, dtype=np.float64)
    kwargs = {"distances": X} if metric == "precomputed" else {"coords": X}
    if metric not in ("euclidean", "precomputed"):
        raise ValueError(f"metric must be 'euclidean' or 'precomputed', got {metric!r}")
    if sample_weight is None:
        return FiniteMeasureSpace(**kwargs)
    return FiniteMeasureSpace.from_unnormalized(sample_weight, **kwargs)


class DTMTransformer(TransformerMixin, BaseEstimator):
    """Distance to the (weighted) empirical measure of the training points.

    Parameters
    ----------
    mass : float in (0, 1]
    metric : {"euclidean", "precomputed"}
        With "precomputed", ``fit`` takes a square distance matrix and
        ``transform`` takes distances from each query to the training points.
    n_jobs : int
        Worker threads for the neighbor search.
    """

    def __init__(self, mass=0.05, metric="euclidean", n_jobs=1):
        self.mass = mass
        self.metric = metric
        self.n_jobs = n_jobs

    def fit(self, X, y=None, sample_weight=None):
        check_mass(self.mass)
        self.space_ = _as_space(X, self.metric, sample_weight)
        self.n_features_in_ = self.space_.n_points if self.space_.is_matrix else self.space_.dim
        return self

    def transform(self, X):
        check_is_fitted(self, "space_")
        space = self.space_
        if space.is_matrix:
            D = check_array(X, dtype=np.float64)
            if D.shape[1] != space.n_points:
                raise ValueError(f"expected distances to {space.n_points} training points, got {D.shape[1]}")
            out = np.empty(D.shape[0])
            for r, d in enumerate(D):
                order = _canonical_order(d, space.weights)
                out[r] = _dtm_sorted(d[order], space.weights[order], self.mass)
            return out[:, None]
        X = check_array(X, dtype=np.float64)
        return dtm_values(space, self.mass, queries=X, workers=self.n_jobs)[:, None]


class DTMSignature(BaseEstimator):
    """Empirical DTM-signature of a sample; ``distance`` compares two fitted signatures."""

    def __init__(self, mass=0.05, metric="euclidean", n_jobs=1):
        self.mass = mass
        self.metric = metric
        self.n_jobs = n_jobs

    def fit(self, X, y=None, sample_weight=None):
        space = _as_space(X, self.metric, sample_weight)
        cache = DTMCache(space, self.mass, workers=self.n_jobs)
        self.dtm_values_ = cache.values
        self.signature_ = cache.full()
        return self

    def distance(self, other: "DTMSignature") -> float:
        check_is_fitted(self, "signature_")
        check_is_fitted(other, "signature_")
        return w1(self.signature_.dist, other.signature_.dist)


class DTMIsomorphismTest(BaseEstimator):
    """Bootstrap test of H0: the two samples come from isomorphic mm-spaces.

    ``fit(P, Q)`` runs the test; results land in ``statistic_``,
    ``critical_value_``, ``p_value_``, ``reject_`` and ``report_``.
    """

    def __init__(self, mass=0.05, n_subsample=20, n_bootstrap=1000, alpha=0.05,
                 random_state=0, metric="euclidean", n_jobs=1):
        self.mass = mass
        self.n_subsample = n_subsample
        self.n_bootstrap = n_bootstrap
        self.alpha = alpha
        self.random_state = random_state
        self.metric = metric
        self.n_jobs = n_jobs

    def fit(self, P, Q):
        params = TestParams(m=self.mass, n=self.n_subsample, n_mc=self.n_bootstrap,
                            alpha=self.alpha, seed=int(self.random_state))
        report = run_test(_as_space(P, self.metric), _as_space(Q, self.metric), params,
                          n_jobs=self.n_jobs)
        self.report_ = report
        self.statistic_ = report.statistic
        self.critical_value_ = report.critical_value
        self.p_value_ = report.p_value
        self.reject_ = report.reject
        self.bootstrap_distribution_ = report.boot
        return self
