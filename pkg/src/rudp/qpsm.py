"""Quadratic problems on the Stiefel manifold.

Solves ``max_{V^T V = I} trace(V^T A V) + 2 trace(V^T B)`` for symmetric
positive semidefinite ``A`` by generalized power iteration: each step replaces
``V`` with the orthonormal polar factor of the objective's gradient
``2 A V + 2 B``. Because the objective is convex in ``V`` the step never
decreases it.
"""

import numpy as np

from .linalg import _check_symmetric, max_eigenvalue, orthogonality_residual, polar_orthonormalize

__all__ = ["QpsmProblem", "GpiResult", "qpsm_objective", "shift_to_psd", "gpi_solve"]


class QpsmProblem:
    """``max trace(V^T A V) + 2 trace(V^T B)`` over orthonormal ``p x q`` matrices ``V``.

    GPI is a local ascent method. With ``extra_starts=True`` the solver also
    runs from the top-``q`` eigenvectors of ``A`` (column signs aligned with
    ``B``) and from the polar factor of ``B``, and keeps the best result.
    """

    def __init__(self, A, B, V0, max_iters=200, tol=1e-10, extra_starts=False):
        self.A = _check_symmetric(A)
        self.B = np.asarray(B, dtype=float)
        self.V0 = np.asarray(V0, dtype=float)
        p, q = self.V0.shape
        if self.A.shape[0] != p or self.B.shape != (p, q):
            raise ValueError(
                f"inconsistent shapes: A {self.A.shape}, B {self.B.shape}, V0 {self.V0.shape}"
            )
        if p < q:
            raise ValueError(f"need p >= q, got V0 of shape {self.V0.shape}")
        self.max_iters = int(max_iters)
        self.tol = float(tol)
        self.extra_starts = bool(extra_starts)


class GpiResult:
    __slots__ = ("V", "ascent_trace", "iterations", "rank_deficient")

    def __init__(self, V, ascent_trace, iterations, rank_deficient):
        self.V = V
        self.ascent_trace = ascent_trace
        self.iterations = iterations
        self.rank_deficient = rank_deficient

    def __iter__(self):
        yield self.V
        yield self.ascent_trace

    @property
    def objective(self):
        return self.ascent_trace[-1]


def qpsm_objective(A, B, V):
    return float(np.vdot(V, A @ V) + 2.0 * np.vdot(V, B))


def shift_to_psd(A):
    """Return ``(sigma_max * I - A, sigma_max)``.

    Under ``V^T V = I`` the shift adds only the constant ``sigma_max * q``, and
    flips the sign of the quadratic form, so minimizing ``trace(V^T A V)`` is
    the same as maximizing over the shifted, PSD matrix.
    """
    A = _check_symmetric(A)
    sigma = max_eigenvalue(A)
    shifted = -A
    shifted[np.diag_indices_from(shifted)] += sigma
    return shifted, sigma


def _polar(M, rank_tol=1e-12):
    # unvalidated polar factor for the inner loop
    left, sv, right_t = np.linalg.svd(M, full_matrices=False)
    return left @ right_t, bool(sv[-1] <= rank_tol * max(sv[0], np.finfo(float).tiny))


def _alternative_starts(A, B, q):
    _, vecs = np.linalg.eigh(A)
    top = vecs[:, ::-1][:, :q]
    signs = np.where(np.einsum("ij,ij->j", top, B) < 0, -1.0, 1.0)
    starts = [top * signs]
    if B.any():
        starts.append(_polar(B)[0])
    return starts


def gpi_solve(prob):
    """Generalized power iteration from ``prob.V0`` (and optional extra starts).

    The returned ``V`` never scores below the warm-start run, so a caller
    that needs ascent from ``V0`` gets it with or without extra starts.
    """
    best = _gpi_run(prob, prob.V0)
    if prob.extra_starts:
        for V0 in _alternative_starts(prob.A, prob.B, prob.V0.shape[1]):
            run = _gpi_run(prob, V0)
            if run.objective > best.objective:
                best = run
    return best


def _gpi_run(prob, V0):
    """Generalized power iteration from the start ``V0``.

    Stops once the objective gain falls to ``prob.tol * max(1, |value|)`` or after
    ``prob.max_iters`` steps. The trace starts with the objective at ``V0``.
    A vanishing gradient means every feasible point is stationary; ``V0`` is
    then returned unchanged and ``rank_deficient`` is set.
    """
    A, B = prob.A, prob.B
    V = np.asarray(V0, dtype=float)
    if orthogonality_residual(V) > 1e-12:
        V = polar_orthonormalize(V)
    value = qpsm_objective(A, B, V)
    trace = [value]
    flagged = False
    iterations = 0
    for iterations in range(1, prob.max_iters + 1):
        grad = 2.0 * (A @ V) + 2.0 * B
        if not grad.any():
            flagged = True
            break
        V_next, deficient = _polar(grad)
        flagged = flagged or deficient
        value_next = qpsm_objective(A, B, V_next)
        if value_next < value:
            # rounding only; the step is an ascent step in exact arithmetic
            break
        V, gain, value = V_next, value_next - value, value_next
        trace.append(value)
        if gain <= prob.tol * max(1.0, abs(value)):
            break
    return GpiResult(V, np.asarray(trace), iterations, flagged)
