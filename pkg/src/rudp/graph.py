"""Similarity graph learned from the cluster indicator.

Each similarity depends only on its own pairwise distance,
``s_ij = exp(-d_ij^2 / gamma_i)``, which is the per-entry minimizer of
``d^2 * s + gamma * (s ln s - s)``. Points are rows of the matrix passed to
:func:`pairwise_sq_dists`.
"""

import numpy as np
from scipy.sparse import csr_matrix
from scipy.sparse.csgraph import connected_components as _cc

from ._validation import as_finite_matrix, check_count

GAMMA_FLOOR = 1e-12


def pairwise_sq_dists(V):
    """Squared Euclidean distances between the rows of ``V``."""
    V = as_finite_matrix(V, name="V")
    sq = np.einsum("ij,ij->i", V, V)
    D2 = sq[:, None] + sq[None, :] - 2.0 * (V @ V.T)
    np.maximum(D2, 0.0, out=D2)
    D2 = 0.5 * (D2 + D2.T)
    np.fill_diagonal(D2, 0.0)
    return D2


def select_bandwidths(D2, knn):
    """Per-sample bandwidth: mean of the ``knn`` smallest off-diagonal squared distances."""
    D2 = np.asarray(D2, dtype=float)
    n = D2.shape[0]
    if n < 2:
        raise ValueError("bandwidth selection needs at least two points")
    knn = check_count(knn, "knn", low=1, high=n - 1)
    off = D2.copy()
    np.fill_diagonal(off, np.inf)
    nearest = np.partition(off, knn - 1, axis=1)[:, :knn]
    return np.maximum(nearest.mean(axis=1), GAMMA_FLOOR)


def similarity_closed_form(D2, gamma):
    """``s_ij = exp(-D2_ij / gamma_i)``; row ``i`` uses its own bandwidth."""
    D2 = np.asarray(D2, dtype=float)
    gamma = np.asarray(gamma, dtype=float)
    if np.any(gamma <= 0):
        raise ValueError("bandwidths must be positive")
    return np.exp(-D2 / gamma[:, None])


def laplacian(S):
    """Graph Laplacian of the symmetrized adjacency ``(S + S^T) / 2``.

    The diagonal of ``S`` cancels between degree and adjacency, so self-loops
    do not affect the result.
    """
    S = np.asarray(S, dtype=float)
    W = 0.5 * (S + S.T)
    L = -W
    L[np.diag_indices_from(L)] += W.sum(axis=1)
    return L


def entropy_term(S, gamma):
    """``sum_i gamma_i sum_j (s_ij ln s_ij - s_ij)`` with ``0 ln 0 = 0``."""
    S = np.asarray(S, dtype=float)
    gamma = np.asarray(gamma, dtype=float)
    with np.errstate(divide="ignore", invalid="ignore"):
        slogs = np.where(S > 0, S * np.log(np.where(S > 0, S, 1.0)), 0.0)
    return float(gamma @ (slogs - S).sum(axis=1))


def smoothness(G, L):
    """``trace(G^T L G)``."""
    G = np.asarray(G, dtype=float)
    L = np.asarray(L, dtype=float)
    if G.ndim == 1:
        G = G[:, None]
    if L.shape != (G.shape[0], G.shape[0]):
        raise ValueError(f"Laplacian shape {L.shape} does not match G with {G.shape[0]} rows")
    return float(np.sum(G * (L @ G)))


def connected_components(S, threshold=0.0):
    """Component count of the graph with an edge wherever ``(s_ij + s_ji)/2 > threshold``."""
    S = np.asarray(S, dtype=float)
    adjacency = 0.5 * (S + S.T) > threshold
    count, _ = _cc(csr_matrix(adjacency), directed=False)
    return int(count)
