"""scikit-learn style wrapper around :func:`rudp.core.fit`.

The estimator takes the usual ``(n_samples, n_features)`` layout and
transposes internally; everything in :mod:`rudp.core` works on ``d x n``.
"""

import numpy as np
from sklearn.base import BaseEstimator, ClusterMixin, TransformerMixin
from sklearn.utils.validation import check_array, check_is_fitted

from .core import Hyperparams, fit


class RUDP(ClusterMixin, TransformerMixin, BaseEstimator):
    """Joint projection, graph learning and clustering.

    Parameters
    ----------
    n_components : int
        Target dimension ``m`` of the orthonormal projection.
    n_clusters : int
        Number of clusters ``c``.
    lam, beta : float
        Weights of the graph smoothness and entropy terms.
    n_neighbors : int
        Neighborhood size used to pick the per-sample graph bandwidths.
    max_iter, tol : int, float
        Outer sweep cap and relative objective change that counts as converged.
    label_rule : {"kmeans", "argmax"}
        How hard labels are read off the relaxed indicator.
    random_state : int
        Seed for the random orthonormal starting points.

    Attributes
    ----------
    components_ : ndarray (n_features, n_components)
    labels_ : ndarray (n_samples,)
    indicator_ : ndarray (n_samples, n_clusters)
    centers_ : ndarray (n_components, n_clusters)
    similarity_ : ndarray (n_samples, n_samples)
    objective_ : ndarray of the per-sweep objective values
    n_iter_, converged_, mean_
    """

    def __init__(self, n_components=5, n_clusters=3, lam=0.1, beta=0.1, n_neighbors=5,
                 max_iter=100, tol=1e-5, label_rule="kmeans", random_state=0):
        self.n_components = n_components
        self.n_clusters = n_clusters
        self.lam = lam
        self.beta = beta
        self.n_neighbors = n_neighbors
        self.max_iter = max_iter
        self.tol = tol
        self.label_rule = label_rule
        self.random_state = random_state

    def _hyperparams(self):
        return Hyperparams(lam=self.lam, beta=self.beta, m=self.n_components, c=self.n_clusters,
                           knn=self.n_neighbors, max_outer_iters=self.max_iter,
                           eps_converge=self.tol, seed=self.random_state,
                           label_rule=self.label_rule)

    def fit(self, X, y=None):
        X = check_array(X, dtype=np.float64, ensure_min_samples=2)
        result = fit(X.T, self._hyperparams())
        state = result.final
        self.mean_ = X.mean(axis=0)
        self.components_ = state.W
        self.centers_ = state.F
        self.indicator_ = state.G
        self.similarity_ = state.S
        self.labels_ = result.labels
        self.objective_ = result.objective_values
        self.n_iter_ = result.iterations_used
        self.converged_ = result.converged
        self.fit_result_ = result
        self.n_features_in_ = X.shape[1]
        return self

    def transform(self, X):
        """Project centered samples onto the learned directions."""
        check_is_fitted(self, "components_")
        X = check_array(X, dtype=np.float64)
        if X.shape[1] != self.n_features_in_:
            raise ValueError(f"X has {X.shape[1]} features, expected {self.n_features_in_}")
        return (X - self.mean_) @ self.components_
