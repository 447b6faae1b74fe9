"""Scatter matrices and the link between factorization error and within-class scatter.

With a hard indicator ``G`` and the optimal centers ``F* = W^T X G (G^T G)^-1``,
the squared reconstruction error ``||W^T X - F* G^T||_F^2`` of centered data
equals ``trace(W^T Sw W)``. :func:`factorization_scatter_gap` measures the
difference between the two sides, which should be at rounding level.
"""

import numpy as np

from ._validation import as_finite_matrix, as_label_vector
from .linalg import center_columns

__all__ = ["hard_indicator", "scatter_matrices", "optimal_center", "factorization_scatter_gap"]


def hard_indicator(labels, c=None):
    """0/1 indicator ``G`` (n x c) of integer labels in ``[0, c)``; empty classes are rejected."""
    labels = as_label_vector(labels)
    if labels.size and labels.min() < 0:
        raise ValueError("hard labels must be non-negative")
    c = int(labels.max()) + 1 if c is None else int(c)
    if labels.size and labels.max() >= c:
        raise ValueError(f"label {int(labels.max())} out of range for c={c}")
    G = np.zeros((labels.size, c))
    G[np.arange(labels.size), labels] = 1.0
    empty = np.flatnonzero(G.sum(axis=0) == 0)
    if empty.size:
        raise ValueError(f"class(es) {empty.tolist()} have no samples; G^T G is singular")
    return G


def _class_projector(G):
    GtG = G.T @ G
    try:
        return G @ np.linalg.solve(GtG, G.T)
    except np.linalg.LinAlgError as exc:
        raise ValueError("G^T G is singular") from exc


def scatter_matrices(X, labels):
    """Total, between-class and within-class scatter ``(St, Sb, Sw)`` of ``X`` (d x n)."""
    X = as_finite_matrix(X, name="X")
    G = hard_indicator(labels)
    if X.shape[1] != G.shape[0]:
        raise ValueError(f"X has {X.shape[1]} samples but {G.shape[0]} labels were given")
    Xc = center_columns(X)
    St = Xc @ Xc.T
    Sb = Xc @ _class_projector(G) @ Xc.T
    St = 0.5 * (St + St.T)
    Sb = 0.5 * (Sb + Sb.T)
    return St, Sb, St - Sb


def optimal_center(W, X, G):
    """Least-squares centers ``W^T X G (G^T G)^-1`` for any full-rank ``G``."""
    W = as_finite_matrix(W, name="W")
    X = as_finite_matrix(X, name="X")
    G = as_finite_matrix(G, name="G")
    if W.shape[0] != X.shape[0] or X.shape[1] != G.shape[0]:
        raise ValueError(f"inconsistent shapes W {W.shape}, X {X.shape}, G {G.shape}")
    GtG = G.T @ G
    rhs = W.T @ X @ G
    try:
        return np.linalg.solve(GtG, rhs.T).T
    except np.linalg.LinAlgError as exc:
        raise ValueError("G^T G is singular") from exc


def factorization_scatter_gap(W, X, labels):
    """``| ||W^T X - F* G^T||_F^2 - trace(W^T Sw W) |`` for centered ``X`` and hard labels."""
    X = as_finite_matrix(X, name="X")
    W = as_finite_matrix(W, name="W")
    G = hard_indicator(labels)
    F = optimal_center(W, X, G)
    left = float(np.sum((W.T @ X - F @ G.T) ** 2))
    _, _, Sw = scatter_matrices(X, labels)
    right = float(np.trace(W.T @ Sw @ W))
    return abs(left - right)
