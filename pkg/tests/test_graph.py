import numpy as np
import pytest
from hypothesis import given, strategies as st
from hypothesis.extra.numpy import arrays

from rudp import graph
from rudp.linalg import sym_eig


def test_pairwise_examples(rng):
    assert not graph.pairwise_sq_dists(np.ones((4, 3))).any()
    np.testing.assert_allclose(graph.pairwise_sq_dists([[0.0], [3.0]]), [[0, 9], [9, 0]])
    V = rng.standard_normal((10, 4))
    oracle = np.array([[np.sum((V[i] - V[j]) ** 2) for j in range(10)] for i in range(10)])
    np.testing.assert_allclose(graph.pairwise_sq_dists(V), oracle, atol=1e-10)


def test_bandwidth_examples(rng):
    D2 = graph.pairwise_sq_dists(np.zeros((3, 2)))
    np.testing.assert_array_equal(graph.select_bandwidths(D2, 2), np.full(3, graph.GAMMA_FLOOR))
    D2 = graph.pairwise_sq_dists([[0.0], [1.0], [10.0]])
    assert graph.select_bandwidths(D2, 1)[0] == 1.0
    D2 = graph.pairwise_sq_dists(rng.standard_normal((12, 3)))
    for k in (1, 4, 11):
        oracle = [np.mean(sorted(np.delete(D2[i], i))[:k]) for i in range(12)]
        np.testing.assert_array_equal(graph.select_bandwidths(D2, k), oracle)


def test_bandwidth_errors():
    with pytest.raises(ValueError):
        graph.select_bandwidths(np.zeros((1, 1)), 1)
    with pytest.raises(ValueError):
        graph.select_bandwidths(np.zeros((3, 3)), 3)


def test_similarity_examples():
    S = graph.similarity_closed_form(np.array([[0.0, 2.0], [2.0, 0.0]]), np.array([2.0, 1.0]))
    assert S[0, 0] == 1.0
    assert abs(S[0, 1] - np.exp(-1)) <= 1e-15
    assert abs(S[1, 0] - np.exp(-2)) <= 1e-15
    with pytest.raises(ValueError):
        graph.similarity_closed_form(np.zeros((2, 2)), np.array([1.0, 0.0]))


@given(st.floats(0, 50), st.floats(0.1, 50))
def test_similarity_is_entry_minimizer(d2, gamma):
    s = graph.similarity_closed_form(np.array([[d2]]), np.array([gamma]))[0, 0]
    f = lambda x: d2 * x + gamma * (x * np.log(x) - x)  # noqa: E731
    assert 0 < s <= 1
    for other in (s * 0.99, min(1.0, s * 1.01), 1.0, 0.5):
        assert f(s) <= f(other) + 1e-12 * max(1.0, abs(f(s)))


def test_similarity_symmetric_for_equal_bandwidths(rng):
    D2 = graph.pairwise_sq_dists(rng.standard_normal((6, 2)))
    S = graph.similarity_closed_form(D2, np.full(6, 0.7))
    np.testing.assert_array_equal(S, S.T)


def test_laplacian_examples(rng):
    assert not graph.laplacian(np.zeros((3, 3))).any()
    np.testing.assert_array_equal(graph.laplacian(np.array([[0.0, 1.0], [1.0, 0.0]])),
                                  [[1, -1], [-1, 1]])
    S = rng.uniform(size=(8, 8))
    L = graph.laplacian(S)
    np.testing.assert_array_equal(L, L.T)
    assert np.abs(L.sum(axis=1)).max() <= 1e-10
    assert sym_eig(L).eigenvalues[-1] >= -1e-9


def test_laplacian_ignores_diagonal(rng):
    S = rng.uniform(size=(5, 5))
    T = S.copy()
    np.fill_diagonal(T, 0.0)
    np.testing.assert_allclose(graph.laplacian(S), graph.laplacian(T), atol=1e-14)


@given(arrays(np.float64, (5, 5), elements=st.floats(0, 1)),
       arrays(np.float64, 5, elements=st.floats(-10, 10)))
def test_laplacian_quadratic_form(S, x):
    W = 0.5 * (S + S.T)
    pairwise = sum(W[i, j] * (x[i] - x[j]) ** 2 for i in range(5) for j in range(i + 1, 5))
    value = x @ graph.laplacian(S) @ x
    assert abs(value - pairwise) <= 1e-9 * max(1.0, pairwise)
    assert value >= -1e-9


def test_entropy_examples(rng):
    assert graph.entropy_term(np.ones((4, 4)), np.ones(4)) == -16.0
    assert graph.entropy_term(np.zeros((3, 3)), np.ones(3)) == 0.0
    S = rng.uniform(size=(5, 5))
    S[0, 1] = 0.0
    gamma = rng.uniform(0.1, 2, size=5)
    oracle = 0.0
    for i in range(5):
        for j in range(5):
            s = S[i, j]
            oracle += gamma[i] * ((s * np.log(s) if s > 0 else 0.0) - s)
    assert abs(graph.entropy_term(S, gamma) - oracle) <= 1e-12


def test_entropy_entrywise_minimum_at_one():
    grid = np.linspace(1e-6, 1, 1001)
    values = grid * np.log(grid) - grid
    assert np.argmin(values) == grid.size - 1


def test_smoothness_examples(rng):
    S = rng.uniform(size=(6, 6))
    L = graph.laplacian(S)
    assert abs(graph.smoothness(np.ones((6, 2)), L)) <= 1e-12
    assert graph.smoothness(rng.standard_normal((6, 2)), np.zeros((6, 6))) == 0.0
    G = rng.standard_normal((6, 3))
    W = 0.5 * (S + S.T)
    pairwise = 0.5 * sum(np.sum((G[i] - G[j]) ** 2) * W[i, j] for i in range(6) for j in range(6))
    assert abs(graph.smoothness(G, L) - pairwise) <= 1e-9
    with pytest.raises(ValueError):
        graph.smoothness(np.ones((5, 2)), L)


def _union_find_count(adj):
    n = adj.shape[0]
    parent = list(range(n))

    def find(i):
        while parent[i] != i:
            parent[i] = parent[parent[i]]
            i = parent[i]
        return i

    for i in range(n):
        for j in range(n):
            if adj[i, j]:
                parent[find(i)] = find(j)
    return len({find(i) for i in range(n)})


def test_connected_components(rng):
    S = np.zeros((6, 6))
    S[:3, :3] = 1.0
    S[3:, 3:] = 1.0
    assert graph.connected_components(S, 0.0) == 2
    assert graph.connected_components(np.ones((4, 4))) == 1
    for _ in range(20):
        S = rng.uniform(size=(15, 15)) * (rng.uniform(size=(15, 15)) < 0.1)
        adj = 0.5 * (S + S.T) > 0.05
        assert graph.connected_components(S, 0.05) == _union_find_count(adj)
