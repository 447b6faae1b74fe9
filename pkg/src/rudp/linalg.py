"""Dense matrix primitives shared by the optimizer.

Data matrices follow the column convention used throughout the package:
a ``d x n`` array holds one sample per column.
"""

import numpy as np
import scipy.linalg

from ._validation import as_finite_matrix

__all__ = [
    "EigResult",
    "l21_norm",
    "center_columns",
    "sym_eig",
    "jacobi_eig",
    "max_eigenvalue",
    "polar_orthonormalize",
    "random_orthonormal",
    "orthogonality_residual",
]

SYMMETRY_TOL = 1e-8


class EigResult:
    """Eigenvalues sorted descending with matching orthonormal eigenvectors."""

    __slots__ = ("eigenvalues", "eigenvectors")

    def __init__(self, eigenvalues, eigenvectors):
        self.eigenvalues = eigenvalues
        self.eigenvectors = eigenvectors

    def __iter__(self):
        yield self.eigenvalues
        yield self.eigenvectors

    def __repr__(self):
        return f"EigResult(eigenvalues={self.eigenvalues!r})"


def l21_norm(M, axis="columns"):
    """Sum of the Euclidean norms of the columns (or rows) of ``M``."""
    M = np.asarray(M, dtype=float)
    if M.ndim == 1:
        M = M[:, None]
    if axis == "columns":
        return float(np.linalg.norm(M, axis=0).sum())
    if axis == "rows":
        return float(np.linalg.norm(M, axis=1).sum())
    raise ValueError(f"axis must be 'columns' or 'rows', got {axis!r}")


def center_columns(X):
    """Subtract the mean column, i.e. return ``X @ H`` with the centering matrix ``H``."""
    X = np.asarray(X, dtype=float)
    return X - X.mean(axis=1, keepdims=True)


def _check_symmetric(A):
    A = as_finite_matrix(A, name="A")
    if A.shape[0] != A.shape[1]:
        raise ValueError(f"expected a square matrix, got shape {A.shape}")
    scale = max(1.0, float(np.abs(A).max()))
    if np.abs(A - A.T).max() > SYMMETRY_TOL * scale:
        raise ValueError("matrix is not symmetric")
    return 0.5 * (A + A.T)


def jacobi_eig(A, tol=1e-11, max_sweeps=100):
    """Cyclic Jacobi eigendecomposition of a symmetric matrix.

    Sweeps over all off-diagonal pairs until the off-diagonal Frobenius norm
    drops below ``tol * ||A||_F``. Intended for small matrices; cost is
    O(n^3) per sweep with a Python-level loop over pairs.
    """
    A = _check_symmetric(A).copy()
    n = A.shape[0]
    V = np.eye(n)
    target = tol * max(np.linalg.norm(A), np.finfo(float).tiny)
    for _ in range(max_sweeps):
        off = np.sqrt(max(np.sum(A * A) - np.sum(np.diag(A) ** 2), 0.0))
        if off <= target:
            break
        for p in range(n - 1):
            for q in range(p + 1, n):
                apq = A[p, q]
                if apq == 0.0:
                    continue
                g = 100.0 * abs(apq)
                if abs(A[p, p]) + g == abs(A[p, p]) and abs(A[q, q]) + g == abs(A[q, q]):
                    # below rounding relative to both diagonal entries
                    A[p, q] = A[q, p] = 0.0
                    continue
                theta = (A[q, q] - A[p, p]) / (2.0 * apq)
                if theta == 0.0:
                    t = 1.0
                else:
                    t = np.sign(theta) / (abs(theta) + np.sqrt(theta * theta + 1.0))
                c = 1.0 / np.sqrt(t * t + 1.0)
                s = t * c
                # A <- J^T A J with J the (p, q) rotation
                ap = A[:, p].copy()
                aq = A[:, q].copy()
                A[:, p] = c * ap - s * aq
                A[:, q] = s * ap + c * aq
                ap = A[p, :].copy()
                aq = A[q, :].copy()
                A[p, :] = c * ap - s * aq
                A[q, :] = s * ap + c * aq
                vp = V[:, p].copy()
                vq = V[:, q].copy()
                V[:, p] = c * vp - s * vq
                V[:, q] = s * vp + c * vq
    w = np.diag(A).copy()
    order = np.argsort(-w, kind="stable")
    return EigResult(w[order], V[:, order])


def sym_eig(A, method="lapack"):
    """Full spectral decomposition of a symmetric matrix, eigenvalues descending.

    ``method="jacobi"`` uses the in-house cyclic Jacobi solver, which is exact
    enough for the small matrices in tests but slow beyond a few hundred rows;
    ``"lapack"`` delegates to ``numpy.linalg.eigh``.
    """
    if method == "jacobi":
        return jacobi_eig(A)
    if method != "lapack":
        raise ValueError(f"unknown method {method!r}")
    A = _check_symmetric(A)
    w, V = np.linalg.eigh(A)
    return EigResult(w[::-1].copy(), V[:, ::-1].copy())


def max_eigenvalue(A):
    """Largest eigenvalue of a symmetric matrix."""
    A = _check_symmetric(A)
    n = A.shape[0]
    return float(scipy.linalg.eigvalsh(A, subset_by_index=[n - 1, n - 1])[0])


def polar_orthonormalize(M, return_flag=False, rank_tol=1e-12):
    """Orthonormal polar factor of a tall matrix.

    Returns the ``U`` with ``U.T @ U = I`` maximizing ``trace(U.T @ M)``. For a
    rank-deficient ``M`` the SVD still yields an orthonormal completion of the
    column space; pass ``return_flag=True`` to learn whether that happened.
    """
    M = as_finite_matrix(M, name="M")
    p, q = M.shape
    if p < q:
        raise ValueError(f"polar factor needs rows >= cols, got shape {M.shape}")
    left, sv, right_t = np.linalg.svd(M, full_matrices=False)
    U = left @ right_t
    if return_flag:
        deficient = bool(sv[-1] <= rank_tol * max(sv[0], np.finfo(float).tiny))
        return U, deficient
    return U


def random_orthonormal(p, q, seed=None):
    """Seeded ``p x q`` matrix with orthonormal columns (Haar-distributed)."""
    if p < q:
        raise ValueError(f"need p >= q, got p={p}, q={q}")
    if q < 1:
        raise ValueError("q must be positive")
    rng = seed if isinstance(seed, np.random.Generator) else np.random.default_rng(seed)
    Q, R = np.linalg.qr(rng.standard_normal((p, q)))
    signs = np.sign(np.diag(R))
    signs[signs == 0] = 1.0
    return Q * signs


def orthogonality_residual(U):
    """``||U^T U - I||_F``."""
    U = np.asarray(U, dtype=float)
    return float(np.linalg.norm(U.T @ U - np.eye(U.shape[1])))
