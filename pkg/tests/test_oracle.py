import networkx as nx
import numpy as np
import pytest
import scipy.linalg as sla

from conftest import brute_cuts, cut_cap, random_graph
from specsparse.errors import DenseTooLarge, TooLargeForExhaustive, VertexSetMismatch
from specsparse.generators import complete, cycle, path
from specsparse.graph import WeightedGraph
from specsparse.oracle import (
    cut_check,
    dense_eigen,
    exact_resistances,
    loewner_extremes,
    pinv_dense,
    spectral_approx_check,
)


def to_nx(G):
    H = nx.Graph()
    H.add_nodes_from(range(G.n))
    for a, b, w in G.merge_parallel().edges():
        H.add_edge(a, b, weight=w)
    return H


def test_pinv_single_edge():
    G = WeightedGraph.from_arrays(2, [0], [1], [1.0])
    np.testing.assert_allclose(pinv_dense(G), 0.25 * np.array([[1, -1], [-1, 1]]), atol=1e-14)


@pytest.mark.parametrize("seed", range(50))
def test_penrose_identities(seed):
    rng = np.random.default_rng(seed)
    G = random_graph(seed, n=int(rng.integers(5, 61)))
    L = G.laplacian().toarray()
    P = pinv_dense(G)
    assert np.allclose(L @ P @ L, L, atol=1e-10 * np.abs(L).max())
    assert np.allclose(P @ L @ P, P, atol=1e-10 * np.abs(P).max())
    assert np.allclose((L @ P).T, L @ P, atol=1e-10)
    assert np.allclose((P @ L).T, P @ L, atol=1e-10)
    # L+ L is the projector off the all-ones vector
    n = G.n
    assert np.allclose(P @ L, np.eye(n) - np.ones((n, n)) / n, atol=1e-9)


def test_triangle_resistance_series_parallel(triangle):
    # unit edge in parallel with a 2-ohm path: 1*2/(1+2)
    np.testing.assert_allclose(exact_resistances(triangle), [2 / 3] * 3, rtol=1e-12)


@pytest.mark.parametrize("seed", range(10))
def test_resistances_match_networkx(seed):
    G = random_graph(seed, n=15)
    H = to_nx(G)
    R = exact_resistances(G)
    ref = [nx.resistance_distance(H, a, b, weight="weight", invert_weight=False) for a, b, _ in G.edges()]
    np.testing.assert_allclose(R, ref, rtol=1e-8)


@pytest.mark.parametrize("seed", range(20))
def test_foster_identity(seed):
    G = random_graph(seed)
    assert abs(np.dot(G.w, exact_resistances(G)) - (G.n - 1)) < 1e-9


def test_dense_eigen_known_spectra():
    np.testing.assert_allclose(dense_eigen(path(3))[0], [0, 1, 3], atol=1e-12)
    np.testing.assert_allclose(dense_eigen(complete(4))[0], [0, 4, 4, 4], atol=1e-12)
    np.testing.assert_allclose(dense_eigen(cycle(4))[0], [0, 2, 2, 4], atol=1e-12)


def test_dense_eigen_normalized_path():
    lam = dense_eigen(path(3), normalized=True)[0]
    np.testing.assert_allclose(lam, [0, 1, 2], atol=1e-12)


def test_dense_guard():
    G = path(2001)
    with pytest.raises(DenseTooLarge):
        pinv_dense(G)


def test_spectral_check_identity_and_scaling():
    G = random_graph(3)
    rep = spectral_approx_check(G, G, 0.01)
    assert rep.passed
    assert rep.lambda_min_ratio == pytest.approx(1.0, abs=1e-10)
    assert rep.lambda_max_ratio == pytest.approx(1.0, abs=1e-10)
    rep = spectral_approx_check(G, G.scaled(1.2), 0.1)
    assert not rep.passed
    assert rep.lambda_max_ratio == pytest.approx(1.2, rel=1e-10)
    assert spectral_approx_check(G, G.scaled(1.05), 0.1).passed


@pytest.mark.parametrize("seed", range(10))
def test_loewner_extremes_match_grounded_pencil(seed):
    G = random_graph(seed)
    rng = np.random.default_rng(seed + 100)
    H = G.with_weights(G.w * rng.uniform(0.3, 3.0, G.m))
    LG = G.laplacian().toarray()[:-1, :-1]
    LH = H.laplacian().toarray()[:-1, :-1]
    ev = sla.eigh(LH, LG, eigvals_only=True)
    lo, hi = loewner_extremes(G, H)
    assert lo == pytest.approx(ev[0], rel=1e-8)
    assert hi == pytest.approx(ev[-1], rel=1e-8)
    rep = spectral_approx_check(G, H, 0.5)
    assert lo - 1e-9 <= rep.quick_min <= rep.quick_max <= hi + 1e-9


def test_spectral_check_vertex_mismatch():
    with pytest.raises(VertexSetMismatch):
        spectral_approx_check(path(3), path(4), 0.5)


def test_cut_check_trivial_cases():
    G = random_graph(1, n=9)
    assert cut_check(G, G, 1 + 1e-9)
    # removing a bridge: cap_H = 0 on the bridge cut
    T = path(6)
    H = T.subgraph(np.array([0, 1, 3, 4]))
    assert not cut_check(T, H, 1e6)


@pytest.mark.parametrize("seed", range(8))
def test_cut_check_matches_brute_force(seed):
    rng = np.random.default_rng(seed)
    G = random_graph(seed, n=7)
    H = G.with_weights(G.w * rng.uniform(0.2, 1.5, G.m))
    ratio = max(cut_cap(G, S) / cut_cap(H, S) for S in brute_cuts(G.n))
    assert cut_check(G, H, ratio * (1 + 1e-9))
    assert not cut_check(G, H, ratio * (1 - 1e-6))


def test_cut_check_large_warns():
    G = random_graph(2, n=20, p=0.4)
    with pytest.warns(TooLargeForExhaustive):
        assert cut_check(G, G, 1.0, rng=0, n_random=2000)
