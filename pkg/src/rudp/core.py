"""Robust unsupervised discriminative projection (RUDP).

Minimizes, over an orthonormal projection ``W`` (d x m), cluster centers
``F`` (m x c), an orthonormal relaxed indicator ``G`` (n x c) and a
similarity matrix ``S`` (n x n)::

    J = ||W^T X - F G^T||_{2,1} / ||X^T W||_{2,1}
        + lam * trace(G^T L_S G)
        + beta * sum_i gamma_i sum_j (s_ij ln s_ij - s_ij)

by alternating closed-form or majorize-minimize updates, each of which is a
descent step on ``J``. ``X`` holds one centered sample per column.
"""

from dataclasses import dataclass, field, replace

import numpy as np

from . import graph
from ._validation import as_finite_matrix, check_count, check_positive
from .linalg import center_columns, l21_norm, orthogonality_residual, random_orthonormal
from .qpsm import QpsmProblem, gpi_solve, shift_to_psd

__all__ = [
    "Hyperparams",
    "ModelState",
    "FitResult",
    "TraceRow",
    "ConvergenceError",
    "objective",
    "residual_weights",
    "update_F",
    "update_G",
    "update_S",
    "update_W",
    "fit",
    "labels_from_indicator",
]

LABEL_RULES = ("kmeans", "argmax")


class ConvergenceError(FloatingPointError):
    """An update produced non-finite values."""


@dataclass(frozen=True)
class Hyperparams:
    lam: float = 0.1
    beta: float = 0.1
    m: int = 5
    c: int = 3
    knn: int = 5
    max_outer_iters: int = 100
    eps_converge: float = 1e-5
    eps_guard: float = 1e-8
    seed: int = 0
    gpi_max_iters: int = 200
    gpi_tol: float = 1e-10
    label_rule: str = "kmeans"
    graph_threshold: float = 0.1

    def __post_init__(self):
        check_positive(self.lam, "lam", allow_zero=True)
        check_positive(self.beta, "beta", allow_zero=True)
        check_count(self.m, "m")
        check_count(self.c, "c", low=2)
        check_count(self.knn, "knn")
        check_count(self.max_outer_iters, "max_outer_iters")
        check_positive(self.eps_converge, "eps_converge")
        check_positive(self.eps_guard, "eps_guard")
        check_count(self.seed, "seed", low=0)
        check_count(self.gpi_max_iters, "gpi_max_iters")
        check_positive(self.gpi_tol, "gpi_tol", allow_zero=True)
        check_positive(self.graph_threshold, "graph_threshold", allow_zero=True)
        if self.label_rule not in LABEL_RULES:
            raise ValueError(f"label_rule must be one of {LABEL_RULES}, got {self.label_rule!r}")

    def check_data(self, d, n):
        if self.m > d:
            raise ValueError(f"target dimension m={self.m} exceeds data dimension d={d}")
        if self.c > n:
            raise ValueError(f"cluster count c={self.c} exceeds sample count n={n}")
        if self.knn > n - 1:
            raise ValueError(f"knn={self.knn} must be below the sample count n={n}")


@dataclass
class ModelState:
    """Optimization variables. ``D`` stores the diagonal of the residual weights."""

    W: np.ndarray
    F: np.ndarray
    G: np.ndarray
    S: np.ndarray
    D: np.ndarray
    gamma: np.ndarray

    def copy(self):
        return ModelState(*(np.array(v, copy=True) for v in
                            (self.W, self.F, self.G, self.S, self.D, self.gamma)))


@dataclass(frozen=True)
class TraceRow:
    iteration: int
    objective: float
    relative_delta: float
    w_orth: float
    g_orth: float


@dataclass
class FitResult:
    final: ModelState
    labels: np.ndarray
    objective_trace: list
    converged: bool
    components_found: int
    iterations_used: int
    xi_trace: list = field(default_factory=list)
    step_trace: list = field(default_factory=list)
    flags: list = field(default_factory=list)

    @property
    def objective_values(self):
        return np.array([row.objective for row in self.objective_trace])


def _residual(state, X):
    return state.W.T @ X - state.F @ state.G.T


def objective(state, X, hp):
    """Value of ``J`` at ``state`` for centered data ``X``."""
    denom = l21_norm(X.T @ state.W, axis="rows")
    if denom <= hp.eps_guard:
        raise ValueError(
            "degenerate projection: ||X^T W||_{2,1} vanishes, every sample projects to zero"
        )
    ratio = l21_norm(_residual(state, X), axis="columns") / denom
    value = ratio
    if hp.lam:
        value += hp.lam * graph.smoothness(state.G, graph.laplacian(state.S))
    if hp.beta:
        value += hp.beta * graph.entropy_term(state.S, state.gamma)
    return float(value)


def residual_weights(state, X, eps_guard=1e-8):
    """Diagonal reweighting ``d_ii = 1 / (2 ||r_i||)`` of the l2,1 residual columns."""
    norms = np.linalg.norm(_residual(state, X), axis=0)
    return 0.5 / np.maximum(norms, eps_guard)


def _weighted_gram(G, D):
    GDG = G.T @ (D[:, None] * G)
    return 0.5 * (GDG + GDG.T)


def update_F(state, X):
    """Weighted least-squares centers ``W^T X D G (G^T D G)^{-1}``."""
    G, D = state.G, state.D
    GDG = _weighted_gram(G, D)
    rhs = state.W.T @ (X * D[None, :]) @ G
    try:
        # F GDG = rhs, GDG symmetric positive definite
        return np.linalg.solve(GDG, rhs.T).T
    except np.linalg.LinAlgError as exc:
        raise ValueError("G^T D G is singular; G must have full column rank") from exc


def _g_problem(state, X, hp, kappa_scale=1.0):
    denom = l21_norm(X.T @ state.W, axis="rows")
    G, D, F = state.G, state.D, state.F
    R1 = (hp.lam * denom) * graph.laplacian(state.S)
    FtF = F.T @ F
    R2 = X.T @ (state.W @ F) - G @ FtF
    kappa = kappa_scale * float(D.max()) * max(float(np.linalg.eigvalsh(FtF)[-1]), 0.0)
    B = D[:, None] * R2 + kappa * G
    A, _ = shift_to_psd(R1)
    return A, B


def _g_objective(state, X, hp, G):
    # the part of J that depends on G
    value = l21_norm(state.W.T @ X - state.F @ G.T) / l21_norm(X.T @ state.W, axis="rows")
    if hp.lam:
        value += hp.lam * graph.smoothness(G, graph.laplacian(state.S))
    return value


# proximal weights tried in order; the last (full) weight gives a true majorizer
KAPPA_SCALES = (0.0, 1e-8, 1e-6, 1e-4, 1e-2, 1e-1, 1.0)


def update_G(state, X, hp, return_info=False):
    """Majorize-minimize step for the indicator on the Stiefel manifold.

    With ``M = F^T F`` and ``kappa = max(D) * lambda_max(M)``, the weighted
    residual ``trace(G^T D G M)`` is bounded above by a function linear in
    ``G`` that is tight at the current ``G``. What remains is a QPSM with
    ``A = sigma_max I - R1`` and ``B = D (X^T W F - G F^T F) + kappa G``,
    where ``R1`` is the graph Laplacian scaled by ``lam * ||X^T W||_{2,1}``.

    A large ``max(D)`` (one nearly exact fit) makes the full ``kappa`` step
    tiny, so smaller weights are tried first and the first step that does
    not increase the G-dependent part of ``J`` is kept. The full weight
    always qualifies.
    """
    current = _g_objective(state, X, hp, state.G)
    for scale in KAPPA_SCALES:
        A, B = _g_problem(state, X, hp, scale)
        res = gpi_solve(QpsmProblem(A, B, state.G, hp.gpi_max_iters, hp.gpi_tol))
        if scale == 1.0 or _g_objective(state, X, hp, res.V) <= current:
            break
    if _g_objective(state, X, hp, res.V) > current:
        res.V = state.G.copy()
    if return_info:
        return res.V, res
    return res.V


def update_S(state, hp, bandwidths=None):
    """Closed-form similarities from the rows of ``G``.

    Returns ``(S, gamma)``. When ``bandwidths`` is None they are selected
    from the current distances; otherwise the given ones are reused so that
    the objective being minimized stays fixed.
    """
    D2 = graph.pairwise_sq_dists(state.G)
    gamma = graph.select_bandwidths(D2, hp.knn) if bandwidths is None else np.asarray(bandwidths)
    if hp.lam == 0:
        S = np.ones_like(D2)
    elif hp.beta == 0:
        # the expanded distance formula leaves rounding noise on duplicate rows
        S = (D2 <= 1e-12 * max(1.0, float(D2.max()))).astype(float)
    else:
        S = graph.similarity_closed_form(D2, (2.0 * hp.beta / hp.lam) * gamma)
    return S, gamma


def _reconstruction_basis(state, X):
    # U with F = W^T U for the D-weighted optimal centers
    G, D = state.G, state.D
    GDG = _weighted_gram(G, D)
    XDG = (X * D[None, :]) @ G
    return np.linalg.solve(GDG, XDG.T).T @ G.T


def _w_problem(state, X, hp):
    W = state.W
    U = _reconstruction_basis(state, X)
    E = X - U
    proj_err = np.linalg.norm(W.T @ E, axis=0)
    proj = W.T @ X
    proj_norm = np.linalg.norm(proj, axis=0)
    denom = proj_norm.sum()
    if denom <= hp.eps_guard:
        raise ValueError("degenerate projection: ||X^T W||_{2,1} vanishes")
    xi = proj_err.sum() / denom
    p = 0.5 / np.maximum(proj_err, hp.eps_guard)
    mu = np.zeros_like(proj)
    nz = proj_norm > 0
    mu[:, nz] = proj[:, nz] / proj_norm[nz]
    A = (E * p[None, :]) @ E.T
    A = 0.5 * (A + A.T)
    B = X @ mu.T
    return A, B, xi


def update_W(state, X, hp, return_info=False):
    """Non-greedy ratio step for the projection.

    With the reconstruction ``U`` fixed, minimizes
    ``sum_i p_i ||W^T (x_i - u_i)||^2 - xi sum_i mu_i^T W^T x_i`` where ``xi`` is
    the current ratio. Any ``W`` that does not increase this surrogate cannot
    increase the ratio ``||W^T (X - U)||_{2,1} / ||X^T W||_{2,1}``.

    Returns ``(W, xi)`` with ``xi`` evaluated at the incoming ``W``.
    """
    A, B, xi = _w_problem(state, X, hp)
    Atilde, _ = shift_to_psd(A)
    res = gpi_solve(QpsmProblem(Atilde, 0.5 * xi * B, state.W, hp.gpi_max_iters, hp.gpi_tol))
    if return_info:
        return res.V, xi, res
    return res.V, xi


def projection_ratio(state, X):
    """``||W^T (X - U)||_{2,1} / ||X^T W||_{2,1}`` for the current reconstruction ``U``."""
    U = _reconstruction_basis(state, X)
    num = l21_norm(state.W.T @ (X - U))
    return num / l21_norm(X.T @ state.W, axis="rows")


def labels_from_indicator(G):
    """Hard labels from a relaxed indicator by sign-aligned row argmax.

    Each column is flipped so its largest-magnitude entry is positive; ties
    go to the lowest column index.
    """
    G = np.asarray(G, dtype=float)
    peak = G[np.argmax(np.abs(G), axis=0), np.arange(G.shape[1])]
    signs = np.where(peak < 0, -1.0, 1.0)
    return np.argmax(G * signs, axis=1)


def _labels_kmeans(G, c, seed):
    from .baselines import kmeans

    norms = np.linalg.norm(G, axis=1, keepdims=True)
    rows = G / np.where(norms > 0, norms, 1.0)
    return kmeans(rows, c, seed=seed, restarts=10).labels


def initial_state(X, hp):
    """Random orthonormal ``W``, ``G``; ``D = I/2``; ``S`` from X-space distances."""
    d, n = X.shape
    rng = np.random.default_rng(hp.seed)
    W = random_orthonormal(d, hp.m, rng)
    G = random_orthonormal(n, hp.c, rng)
    D2 = graph.pairwise_sq_dists(X.T)
    gamma = graph.select_bandwidths(D2, hp.knn)
    S = graph.similarity_closed_form(D2, gamma)
    state = ModelState(W=W, F=np.zeros((hp.m, hp.c)), G=G, S=S, D=np.full(n, 0.5), gamma=gamma)
    state.F = update_F(state, X)
    return state


def _check_finite(name, *arrays):
    for a in arrays:
        if not np.all(np.isfinite(a)):
            raise ConvergenceError(f"non-finite values produced by {name}")


def fit(X, hp, record_steps=False):
    """Run the alternating optimization on ``X`` (d x n, one sample per column).

    Each sweep refreshes the residual weights before every subproblem that
    uses them, then updates F, G, S and W in turn. The first sweep also
    chooses the graph bandwidths, which stay fixed afterwards.
    """
    X = as_finite_matrix(X, name="X", min_cols=2)
    d, n = X.shape
    hp.check_data(d, n)
    X = center_columns(X)
    if not np.any(X):
        raise ValueError("all samples are identical; nothing to project or cluster")

    state = initial_state(X, hp)
    trace, xi_trace, steps, flags = [], [], [], []
    prev = None
    converged = False
    iteration = 0

    def note(step):
        if record_steps:
            steps.append((iteration, step, objective(state, X, hp)))

    for iteration in range(1, hp.max_outer_iters + 1):
        state.D = residual_weights(state, X, hp.eps_guard)
        state.F = update_F(state, X)
        _check_finite("update_F", state.F)
        note("F")

        state.D = residual_weights(state, X, hp.eps_guard)
        state.G, info = update_G(state, X, hp, return_info=True)
        _check_finite("update_G", state.G)
        if info.rank_deficient:
            flags.append((iteration, "G", "rank-deficient GPI step"))
        note("G")

        state.S, state.gamma = update_S(state, hp, None if iteration == 1 else state.gamma)
        _check_finite("update_S", state.S)
        note("S")

        state.D = residual_weights(state, X, hp.eps_guard)
        state.F = update_F(state, X)
        state.W, xi, info = update_W(state, X, hp, return_info=True)
        _check_finite("update_W", state.W)
        if info.rank_deficient:
            flags.append((iteration, "W", "rank-deficient GPI step"))
        state.F = update_F(state, X)
        xi_trace.append(xi)
        note("W")

        value = objective(state, X, hp)
        if not np.isfinite(value):
            raise ConvergenceError(f"objective became non-finite at sweep {iteration}")
        rel = float("nan") if prev is None else abs(prev - value) / max(abs(prev), hp.eps_guard)
        trace.append(TraceRow(iteration, value, rel,
                              orthogonality_residual(state.W), orthogonality_residual(state.G)))
        if prev is not None and rel <= hp.eps_converge:
            converged = True
            break
        prev = value

    if hp.label_rule == "kmeans":
        labels = _labels_kmeans(state.G, hp.c, hp.seed)
    else:
        labels = labels_from_indicator(state.G)
    components = graph.connected_components(state.S, hp.graph_threshold)
    return FitResult(final=state, labels=labels, objective_trace=trace, converged=converged,
                     components_found=components, iterations_used=iteration,
                     xi_trace=xi_trace, step_trace=steps, flags=flags)


def with_params(hp, **changes):
    return replace(hp, **changes)
