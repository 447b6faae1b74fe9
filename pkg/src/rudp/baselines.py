"""Comparison methods: Lloyd k-means and PCA projection."""

from dataclasses import dataclass, field

import numpy as np

from ._validation import as_finite_matrix, check_count
from .linalg import center_columns, sym_eig


@dataclass
class KmeansResult:
    centers: np.ndarray
    labels: np.ndarray
    inertia: float
    iterations: int
    inertia_trace: list = field(default_factory=list)
    reseeded: int = 0


def _sq_dists(points, centers):
    d2 = (np.einsum("ij,ij->i", points, points)[:, None]
          - 2.0 * points @ centers.T
          + np.einsum("ij,ij->i", centers, centers)[None, :])
    return np.maximum(d2, 0.0)


def _plusplus(points, c, rng):
    n = points.shape[0]
    centers = np.empty((c, points.shape[1]))
    centers[0] = points[rng.integers(n)]
    closest = _sq_dists(points, centers[:1]).ravel()
    for k in range(1, c):
        total = closest.sum()
        if total <= 0:
            idx = rng.integers(n)
        else:
            idx = rng.choice(n, p=closest / total)
        centers[k] = points[idx]
        closest = np.minimum(closest, _sq_dists(points, centers[k:k + 1]).ravel())
    return centers


def _lloyd(points, centers, max_iters):
    n = points.shape[0]
    trace = []
    reseeded = 0
    labels = None
    iterations = 0
    for iterations in range(1, max_iters + 1):
        d2 = _sq_dists(points, centers)
        new_labels = np.argmin(d2, axis=1)
        closest = d2[np.arange(n), new_labels]
        trace.append(float(closest.sum()))
        if labels is not None and np.array_equal(new_labels, labels):
            break
        labels = new_labels
        for k in range(centers.shape[0]):
            members = labels == k
            if members.any():
                centers[k] = points[members].mean(axis=0)
            else:
                # empty cluster restarts at the point farthest from its center
                far = int(np.argmax(closest))
                centers[k] = points[far]
                closest[far] = 0.0
                reseeded += 1
    d2 = _sq_dists(points, centers)
    labels = np.argmin(d2, axis=1)
    inertia = float(d2[np.arange(n), labels].sum())
    return centers, labels, inertia, iterations, trace, reseeded


def kmeans(V, c, seed=0, max_iters=300, restarts=10):
    """Lloyd's algorithm from k-means++ seeding, best of ``restarts`` by inertia.

    ``V`` holds one point per row. Restart ``r`` draws its seeding from a
    generator spawned off ``seed``, so results are reproducible.
    """
    points = as_finite_matrix(V, name="V")
    n = points.shape[0]
    c = check_count(c, "c")
    if n < c:
        raise ValueError(f"cannot form {c} clusters from {n} points")
    restarts = check_count(restarts, "restarts")
    best = None
    for child in np.random.SeedSequence(seed).spawn(restarts):
        rng = np.random.default_rng(child)
        centers = _plusplus(points, c, rng)
        run = _lloyd(points, centers, max_iters)
        if best is None or run[2] < best[2]:
            best = run
    centers, labels, inertia, iterations, trace, reseeded = best
    return KmeansResult(centers, labels, inertia, iterations, trace, reseeded)


def pca_project(X, m):
    """Top-``m`` principal directions of ``X`` (d x n) and the projected data.

    Returns ``(W, projected, explained)`` where ``projected = W^T X_centered``
    and ``explained`` are the corresponding covariance eigenvalues.
    """
    X = as_finite_matrix(X, name="X")
    d, n = X.shape
    m = check_count(m, "m", high=min(d, n))
    Xc = center_columns(X)
    cov = (Xc @ Xc.T) / n
    eig = sym_eig(cov)
    W = eig.eigenvectors[:, :m]
    return W, W.T @ Xc, eig.eigenvalues[:m]
