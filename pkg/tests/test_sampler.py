import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import random_graph, random_tree_of
from specsparse.errors import DimensionMismatch, NonPositiveProbability
from specsparse.generators import complete, gnp
from specsparse.graph import build_graph
from specsparse.oracle import exact_resistances, spectral_approx_check
from specsparse.sampler import draw_count, make_plan, oversample_sparsify, sample, sample_counts
from specsparse.trees import compute_stretches


def test_plan_examples():
    p = make_plan([1.0], 0.5, 4)
    assert p.t == 1.0
    assert p.q == math.ceil(4 * 2 * math.log(2) / 0.25)
    p = make_plan([2.0, 2.0, 2.0], 0.5)
    assert p.t == 6.0
    np.testing.assert_allclose(p.p, 1 / 3)
    assert p.q == math.ceil(4 * 6 * math.log(6) / 0.25)


@given(st.lists(st.floats(1e-6, 1e6), min_size=1, max_size=50), st.floats(0.01, 0.99))
@settings(max_examples=100, deadline=None)
def test_plan_properties(pp, eps):
    plan = make_plan(pp, eps)
    assert abs(plan.p.sum() - 1) <= 1e-12
    assert plan.q >= 1
    assert plan.q == draw_count(plan.t, eps)


def test_plan_errors():
    for bad in ([1.0, 0.0], [1.0, -2.0], [np.inf], []):
        with pytest.raises(NonPositiveProbability):
            make_plan(bad, 0.5)
    with pytest.raises(ValueError):
        make_plan([1.0], 1.0)
    with pytest.raises(DimensionMismatch):
        sample(complete(3), make_plan([1.0], 0.5))


def test_one_edge_exact():
    G = build_graph(2, [(0, 1, 3.5)])
    H = sample(G, make_plan([1.0], 0.5), rng=0)
    assert H.m == 1
    assert H.w[0] == pytest.approx(3.5, rel=1e-14)


@given(st.integers(0, 10**6))
@settings(max_examples=30, deadline=None)
def test_exact_draw_count_and_weights(seed):
    G = random_graph(seed % 50, n=20, weighted=True)
    rng = np.random.default_rng(seed)
    plan = make_plan(rng.uniform(0.1, 2.0, G.m), 0.9, C_s=0.5)
    counts = sample_counts(plan, np.random.default_rng(seed))
    assert counts.sum() == plan.q
    H = sample(G, plan, np.random.default_rng(seed))
    keep = counts > 0
    np.testing.assert_allclose(H.w, counts[keep] * G.w[keep] / (plan.p[keep] * plan.q))
    assert H.m <= min(plan.q, G.m)


def test_unbiased_monte_carlo():
    G = build_graph(3, [(0, 1, 1.0), (1, 2, 2.0), (0, 2, 5.0)])
    plan = make_plan([1.0, 1.0, 1.0], 0.99, C_s=0.5)
    rng = np.random.default_rng(0)
    runs = 10000
    tot = np.zeros((runs, 3))
    for i in range(runs):
        c = sample_counts(plan, rng)
        tot[i] = c * G.w / (plan.p * plan.q)
    mean = tot.mean(axis=0)
    se = tot.std(axis=0, ddof=1) / math.sqrt(runs)
    assert np.all(np.abs(mean - G.w) <= 3 * se)


def test_k6_coverage():
    G = complete(6)
    plan = make_plan(np.ones(G.m), 0.5)
    assert plan.q >= G.m * math.log(G.m)
    full = sum(sample(G, plan, rng=s).m == 15 for s in range(100))
    assert full >= 95


def test_deterministic():
    G = random_graph(2, n=40)
    pp = exact_resistances(G) * G.w
    a = oversample_sparsify(G, pp, 0.5, rng=7)
    b = oversample_sparsify(G, pp, 0.5, rng=7)
    assert np.array_equal(a.w, b.w) and np.array_equal(a.u, b.u)


def test_exact_resistance_oversampling_k20():
    G = complete(20)
    pp = G.w * exact_resistances(G)
    plan = make_plan(pp, 0.5)
    assert plan.t == pytest.approx(19)
    assert plan.q == math.ceil(4 * 19 * math.log(19) / 0.25)
    ok = sum(spectral_approx_check(G, oversample_sparsify(G, pp, 0.5, rng=s), 0.5).passed for s in range(100))
    assert ok >= 95


def test_tree_stretch_oversampling():
    G = gnp(30, 0.4, rng=3)
    T = random_tree_of(G, 0)
    pp = compute_stretches(G, T)
    assert np.all(pp >= G.w * exact_resistances(G) * (1 - 1e-9))
    ok = sum(spectral_approx_check(G, oversample_sparsify(G, pp, 0.5, rng=s), 0.5).passed for s in range(100))
    assert ok >= 95


@pytest.mark.slow
@pytest.mark.parametrize("n", [20, 50, 100])
@pytest.mark.parametrize("eps", [0.25, 0.5])
def test_oversampling_rate(n, eps):
    G = gnp(n, min(1.0, 8 / n), rng=n, weights=(1.0, 4.0))
    pp = G.w * exact_resistances(G)
    ok = sum(spectral_approx_check(G, oversample_sparsify(G, pp, eps, rng=s), eps).passed for s in range(100))
    assert ok >= 95
