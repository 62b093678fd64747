import math

import numpy as np
import pytest
from scipy.sparse import coo_matrix
from scipy.sparse.csgraph import shortest_path

from conftest import random_graph, random_tree_of
from specsparse.config import Constants
from specsparse.errors import Disconnected, NotUnweighted, SubgraphMismatch
from specsparse.generators import complete, cycle, gnp, grid, path
from specsparse.graph import build_graph
from specsparse.lst import low_stretch_tree
from specsparse.oracle import loewner_extremes, spectral_approx_check
from specsparse.pipelines import (
    PIPELINES,
    build_spanner,
    incremental_spectral_sparsifier,
    leverage,
    sparsify,
    sparsify_chain,
    sparsify_general,
    sparsify_linear,
    sparsify_spine_heavy,
    sparsify_unweighted,
)
from specsparse.trees import SpanningTree, compute_stretches, scale_spine


def hop_distances(S):
    A = coo_matrix((np.ones(S.m), (S.u, S.v)), shape=(S.n, S.n))
    return shortest_path(A, directed=False, unweighted=True)


# incremental sparsifier


def test_incremental_s_equals_g():
    G = random_graph(0, n=30)
    H, I = incremental_spectral_sparsifier(G, np.ones(G.m, dtype=bool), 1.0, 1.0, rng=0)
    np.testing.assert_allclose(H.w, 2 * G.w)
    lo, hi = loewner_extremes(H, I)
    assert 1 - 1e-9 <= lo and hi <= 2 + 1e-9


def test_incremental_c4_path_tree():
    G = cycle(4)
    T = SpanningTree.from_edges(4, [0, 1, 2], [1, 2, 3], [1.0, 1.0, 1.0])
    st = compute_stretches(G, T)
    H, I, info = incremental_spectral_sparsifier(G, T, st, 3.0, rng=0, return_info=True)
    assert info.t == pytest.approx(1.0)  # off-tree edge (0,3): stretch 3 / kappa 3
    assert I.is_connected()
    assert np.allclose(np.sort(H.w), [1.0, 4.0, 4.0, 4.0])


def test_incremental_subgraph_mismatch():
    G = path(4)
    S = build_graph(4, [(0, 2, 1.0)])
    with pytest.raises(SubgraphMismatch):
        incremental_spectral_sparsifier(G, S, 1.0, 2.0)
    with pytest.raises(SubgraphMismatch):
        incremental_spectral_sparsifier(G, np.ones(5, dtype=bool), 1.0, 2.0)


@pytest.mark.parametrize("seed", range(20))
def test_incremental_sandwich(seed):
    G = random_graph(seed, n=80, p=0.15, weighted=True)
    T = low_stretch_tree(G, rng=seed)
    st = compute_stretches(G, T)
    kappa = max(1.0, st.sum() * math.log(G.n) / (4 * G.n))
    H, I = incremental_spectral_sparsifier(G, T, st, kappa, rng=seed)
    np.testing.assert_allclose(H.laplacian().toarray(), scale_spine(G, T, 1 + kappa).laplacian().toarray())
    lo, hi = loewner_extremes(H, I)
    assert lo >= 1 - 1e-9 and hi <= 2 + 1e-9


def test_incremental_edge_count_prediction():
    G = gnp(100, 0.1, rng=4)
    T = low_stretch_tree(G, rng=0)
    st = compute_stretches(G, T)
    # choose kappa so that the draw count is about n
    kappa = 36 * float(st.sum()) * math.log(G.n) / G.n
    for seed in range(20):
        H, I, info = incremental_spectral_sparsifier(G, T, st, kappa, rng=seed, return_info=True)
        assert info.predicted_edges / 2 <= I.m <= 2 * info.predicted_edges


# spanner


def test_spanner_tree_input():
    T = path(25)
    res = build_spanner(T, rng=0)
    assert res.graph.m == T.m and res.stretch_bound == 1


@pytest.mark.parametrize("seed", range(5))
def test_spanner_complete(seed):
    G = complete(20)
    res = build_spanner(G, rng=seed)
    n = G.n
    assert res.graph.m <= 2 * n * math.log2(n)
    D = hop_distances(res.graph)
    assert np.all(D[G.u, G.v] <= res.stretch_bound)


@pytest.mark.parametrize("seed", range(5))
def test_spanner_random_unweighted(seed):
    G = random_graph(seed, n=150, p=0.1, weighted=False)
    res = build_spanner(G, rng=seed)
    D = hop_distances(res.graph)
    assert np.all(D[G.u, G.v] <= res.stretch_bound)
    assert res.graph.is_connected()


def test_spanner_cycle_kept():
    G = cycle(20)
    res = build_spanner(G, rng=0)
    assert res.graph.m == 20


def test_spanner_rejects_weighted():
    with pytest.raises(NotUnweighted):
        build_spanner(build_graph(2, [(0, 1, 2.0)]))


# leverage


def test_leverage_trivial_contract():
    G = gnp(80, 0.2, rng=1, weights=(1.0, 3.0))
    res = leverage(G, G, 1.0, 0.5, seed=0)
    assert spectral_approx_check(G, res.G_tilde, 0.5).passed
    assert res.extras["t"] <= res.extras["budget"] * (1 + 1e-9)


@pytest.mark.parametrize("seed", range(10))
def test_leverage_budget_holds_in_linear(seed):
    G = gnp(150, 0.1, rng=seed)
    res = sparsify_linear(G, 0.5, seed=seed)
    lev = res.extras["leverage"]
    assert lev["t"] <= lev["budget"] * (1 + 1e-9)
    assert spectral_approx_check(G, res.G_tilde, 0.5).passed


def test_leverage_chain_construction():
    G = gnp(150, 0.1, rng=3)
    T = low_stretch_tree(G, rng=0)
    st = compute_stretches(G, T)
    kappa = 20.0
    H, I = incremental_spectral_sparsifier(G, T, st, kappa, rng=1)
    ok = 0
    for seed in range(20):
        res = leverage(H, I.scaled(1 / (1 + kappa)), 2 * (1 + kappa), 0.5, seed=seed)
        ok += spectral_approx_check(H, res.G_tilde, 0.5).passed
    assert ok >= 19


# pipelines


@pytest.mark.parametrize("algo", sorted(PIPELINES))
def test_tree_input_passthrough(algo):
    T = path(12)
    res = sparsify(T, 0.5, algo, seed=0)
    assert res.G_tilde is T
    assert res.stages and res.bookkeeping_ok()


@pytest.mark.parametrize("algo", sorted(PIPELINES))
def test_disconnected(algo):
    G = build_graph(4, [(0, 1, 1), (2, 3, 1)])
    with pytest.raises(Disconnected):
        sparsify(G, 0.5, algo)


def test_unknown_algorithm():
    with pytest.raises(ValueError):
        sparsify(path(3), 0.5, "magic")


def test_unweighted_rejects_weights():
    with pytest.raises(NotUnweighted):
        sparsify_unweighted(build_graph(3, [(0, 1, 1), (1, 2, 2), (0, 2, 1)]), 0.5)


@pytest.mark.parametrize("algo", sorted(PIPELINES))
@pytest.mark.parametrize("seed", range(3))
def test_pipeline_quality_and_bookkeeping(algo, seed):
    G = gnp(100, 0.1, rng=seed)
    res = sparsify(G, 0.5, algo, seed=seed)
    assert res.G_tilde.n == G.n and res.stages
    assert res.bookkeeping_ok()
    for s in res.stages:
        assert s.edges_out <= max(s.edges_in, G.m)
    assert spectral_approx_check(G, res.G_tilde, 0.5).passed


def test_general_k30_rate_and_size():
    G = complete(30)
    ok = 0
    for s in range(100):
        res = sparsify_general(G, 0.5, seed=s)
        assert res.edge_count <= 4 * 2 * G.n * math.log(2 * G.n) / 0.25
        ok += spectral_approx_check(G, res.G_tilde, 0.5).passed
    assert ok >= 95


def test_general_q_scales_with_inverse_eps_squared():
    G = gnp(60, 0.3, rng=0)
    q = {}
    for eps in (0.25, 0.5):
        note = next(s.note for s in sparsify_general(G, eps, seed=1).stages if s.name == "sample")
        q[eps] = int(note.split("q=")[1])
    assert q[0.25] / q[0.5] == pytest.approx(4.0, rel=0.01)


def test_spine_kappa_budget_recorded():
    G = gnp(200, 0.08, rng=2)
    res = sparsify_spine_heavy(G, 0.5, seed=0)
    kappa = res.extras["kappa"]
    # estimates come at eps_r = 1/2 and are inflated by 1 / (1 - eps_r)
    assert res.extras["t"] <= kappa * (G.n - 1) * 2 * 1.5
    assert spectral_approx_check(G, res.G_tilde, 0.5).passed


def test_spine_kappa_one_degenerates():
    G = gnp(80, 0.15, rng=3)
    res = sparsify_spine_heavy(G, 0.5, seed=0, constants=Constants(c_spine=1e-9))
    assert res.extras["kappa"] == pytest.approx(1.0)
    assert spectral_approx_check(G, res.G_tilde, 0.5).passed


def test_linear_records_kappa1():
    G = gnp(300, 0.2, rng=0)
    res = sparsify_linear(G, 0.5, seed=0)
    assert res.extras["kappa1"] == pytest.approx(math.log(300) ** 5)
    assert any(s.name == "incremental" and "kappa=" in s.param for s in res.stages)
    assert spectral_approx_check(G, res.G_tilde, 0.5).passed


@pytest.mark.parametrize("G", [complete(50), cycle(30), grid(30, 30)], ids=["K50", "C30", "grid30"])
def test_unweighted_examples(G):
    res = sparsify_unweighted(G, 0.5, seed=0)
    assert spectral_approx_check(G, res.G_tilde, 0.5).passed


def test_chain_levels_and_intermediates():
    G = gnp(100, 0.1, rng=6)
    res = sparsify_chain(G, 0.5, seed=0, keep_intermediates=True)
    k1 = res.extras["kappa1"]
    assert res.extras["levels"] == math.ceil(math.log2(k1))
    inter = res.extras["intermediates"]
    assert len(inter) == res.extras["levels"] + 1
    for H, X in inter:
        lo, hi = loewner_extremes(H, X)
        assert lo >= 1 - 1e-9 and hi <= 4 + 1e-9
    assert spectral_approx_check(G, res.G_tilde, 0.5).passed


def test_chain_kappa_sandwich_quadratic_forms():
    G = gnp(100, 0.1, rng=7)
    T = low_stretch_tree(G, rng=0)
    k1 = math.log(G.n) ** 5
    rng = np.random.default_rng(0)
    X = rng.standard_normal((G.n, 100))
    qg = G.quadratic_form(X)
    for i in range(math.ceil(math.log2(k1)) + 1):
        c = k1 / 2**i
        qh = scale_spine(G, T, 1 + c).quadratic_form(X)
        assert np.all(qh >= qg * (1 - 1e-12))
        assert np.all(qh <= (1 + c) * qg * (1 + 1e-12))


@pytest.mark.parametrize("algo", sorted(PIPELINES))
def test_determinism(algo):
    G = gnp(80, 0.15, rng=9)
    a = sparsify(G, 0.5, algo, seed=4).G_tilde
    b = sparsify(G, 0.5, algo, seed=4).G_tilde
    assert np.array_equal(a.u, b.u) and np.array_equal(a.v, b.v) and np.array_equal(a.w, b.w)
