import numpy as np
import pytest

from conftest import random_graph, random_tree_of
from specsparse.errors import Disconnected, TreeDoesNotSpan, TreeNotSubgraph
from specsparse.generators import cycle, gnp, path, star
from specsparse.graph import WeightedGraph, build_graph
from specsparse.oracle import exact_resistances, pinv_dense
from specsparse.trees import (
    SpanningTree,
    compute_stretches,
    max_weight_spanning_tree,
    offline_lca,
    scale_spine,
    spine_kappa,
    stretch_via_cuts,
    total_stretch,
    tree_resistances,
)


def path_tree(n, w=None):
    w = np.ones(n - 1) if w is None else np.asarray(w, float)
    return SpanningTree.from_edges(n, np.arange(n - 1), np.arange(1, n), w)


def naive_lca(T, a, b):
    anc = set()
    x = a
    while x >= 0:
        anc.add(x)
        x = T.parent[x]
    x = b
    while x not in anc:
        x = T.parent[x]
    return x


def test_c4_path_tree():
    G = cycle(4)
    T = path_tree(4)
    st = compute_stretches(G, T)
    # canonical edges: (0,1), (0,3), (1,2), (2,3)
    np.testing.assert_allclose(st, [1, 3, 1, 1])
    assert total_stretch(G, T) == 6
    assert stretch_via_cuts(G, T) == pytest.approx(6)


def test_triangle_weighted_stretch():
    G = build_graph(3, [(0, 1, 1.0), (1, 2, 2.0), (0, 2, 3.0)])
    T = SpanningTree.from_edges(3, [1, 0], [2, 2], [2.0, 3.0])
    st = compute_stretches(G, T)
    assert st[0] == pytest.approx(1 / 2 + 1 / 3)
    np.testing.assert_allclose(st[1:], [1.0, 1.0])


def test_star_cut_stretch():
    G = star(3)
    assert stretch_via_cuts(G, SpanningTree.from_graph(G)) == pytest.approx(3)


def test_tree_resistances_examples():
    T = path_tree(3)
    np.testing.assert_allclose(tree_resistances(T, [(0, 2), (1, 1), (0, 1)]), [2, 0, 1])
    T = path_tree(3, [2.0, 4.0])
    assert tree_resistances(T, [(1, 2)])[0] == pytest.approx(0.25)


def test_tree_does_not_span():
    with pytest.raises(TreeDoesNotSpan):
        SpanningTree.from_edges(4, [0, 1], [1, 2], [1, 1])
    with pytest.raises(TreeDoesNotSpan):
        SpanningTree.from_edges(4, [0, 1, 0], [1, 0, 1], [1, 1, 1])
    with pytest.raises(TreeDoesNotSpan):
        compute_stretches(cycle(5), path_tree(4))


@pytest.mark.parametrize("seed", range(20))
def test_offline_lca_matches_naive(seed):
    G = random_graph(seed, n=30)
    T = random_tree_of(G, seed)
    rng = np.random.default_rng(seed)
    a = rng.integers(0, G.n, 200)
    b = rng.integers(0, G.n, 200)
    got = offline_lca(T, a, b)
    assert [naive_lca(T, x, y) for x, y in zip(a, b)] == got.tolist()


@pytest.mark.parametrize("seed", range(30))
def test_stretch_identities(seed):
    G = random_graph(seed, n=int(np.random.default_rng(seed).integers(5, 51)))
    T = random_tree_of(G, seed + 1)
    lca_total = total_stretch(G, T)
    assert stretch_via_cuts(G, T) == pytest.approx(lca_total, rel=1e-10)
    LG = G.laplacian().toarray()
    trace = np.trace(LG @ pinv_dense(T.to_graph()))
    assert trace == pytest.approx(lca_total, rel=1e-8)
    # tree edges have stretch exactly one
    st = compute_stretches(G, T)
    R = exact_resistances(G)
    assert np.all(st >= G.w * R - 1e-9)


@pytest.mark.parametrize("seed", range(10))
def test_stretch_domination(seed):
    G = random_graph(seed, n=25)
    T = random_tree_of(G, seed)
    rng = np.random.default_rng(seed)
    base = total_stretch(G, T)
    for _ in range(10):
        w = G.w * rng.uniform(0.0, 1.0, G.m)
        w = np.maximum(w, 1e-6)
        assert total_stretch(G.with_weights(w), T) <= base + 1e-9


def test_max_weight_tree_examples():
    G = build_graph(3, [(0, 1, 1.0), (1, 2, 2.0), (0, 2, 3.0)])
    T = max_weight_spanning_tree(G)
    assert T.total_weight() == 5.0
    P = path(6)
    assert max_weight_spanning_tree(P).to_graph() == P
    U = gnp(10, 0.5, rng=4)
    assert max_weight_spanning_tree(U).total_weight() == 9.0
    with pytest.raises(Disconnected):
        max_weight_spanning_tree(build_graph(4, [(0, 1, 1), (2, 3, 1)]))


def test_max_weight_tree_is_maximal():
    import networkx as nx

    for seed in range(10):
        G = random_graph(seed, n=20)
        H = nx.Graph()
        H.add_weighted_edges_from(G.edges())
        ref = sum(d["weight"] for *_, d in nx.maximum_spanning_tree(H).edges(data=True))
        assert max_weight_spanning_tree(G).total_weight() == pytest.approx(ref)


def test_max_weight_tree_tiebreak_is_lowest_index():
    G = cycle(4)  # all ties: greedy keeps edges 0, 1, 2 in canonical order
    T = max_weight_spanning_tree(G)
    got = sorted(map(tuple, np.sort(np.column_stack(T.edge_arrays()[:2]), axis=1).tolist()))
    assert got == [(0, 1), (0, 3), (1, 2)]


def test_scale_spine_examples():
    G = cycle(4)
    T = path_tree(4)
    assert scale_spine(G, T, 1.0) == G
    H = scale_spine(G, T, 3.0)
    st = compute_stretches(H, T.scaled(3.0))
    assert st[1] == pytest.approx(1.0)
    single = build_graph(2, [(0, 1, 2.0)])
    assert scale_spine(single, SpanningTree.from_graph(single), 10).w[0] == 20.0
    with pytest.raises(TreeNotSubgraph):
        scale_spine(path(4), SpanningTree.from_edges(4, [0, 0, 0], [1, 2, 3], [1, 1, 1]), 2.0)


@pytest.mark.parametrize("seed", range(5))
def test_scale_spine_sandwich(seed):
    G = random_graph(seed, n=20)
    T = random_tree_of(G, seed)
    kappa = 7.5
    H = scale_spine(G, T, kappa)
    X = np.random.default_rng(seed).standard_normal((G.n, 100))
    qg = np.einsum("ij,ij->j", X, G.apply_laplacian(X))
    qh = np.einsum("ij,ij->j", X, H.apply_laplacian(X))
    assert np.all(qg <= qh * (1 + 1e-12)) and np.all(qh <= kappa * qg * (1 + 1e-12))


def test_spine_kappa_formula():
    assert spine_kappa(1000.0, 256, 100) == 80
    assert spine_kappa(1.0, 256, 100) == 1
