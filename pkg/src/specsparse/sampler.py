"""Importance sampling with replacement (oversampled effective-resistance sampling)."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import DimensionMismatch, NonPositiveProbability
from .graph import WeightedGraph
from .rng import as_generator

DEFAULT_C_S = 4.0


@dataclass(frozen=True)
class SamplingPlan:
    """Sampling weights ``p_prime``, their total ``t``, draw count ``q`` and distribution ``p``."""

    p_prime: np.ndarray
    t: float
    q: int
    p: np.ndarray
    C_s: float
    epsilon: float

    @property
    def m(self) -> int:
        return len(self.p)


def draw_count(t: float, epsilon: float, C_s: float = DEFAULT_C_S) -> int:
    """``ceil(C_s t ln t / eps^2)``, with t clamped to 2 where ln t would degenerate."""
    tt = max(float(t), 2.0)
    return max(1, math.ceil(C_s * tt * math.log(tt) / (epsilon * epsilon)))


def make_plan(p_prime, epsilon: float, C_s: float = DEFAULT_C_S) -> SamplingPlan:
    p_prime = np.asarray(p_prime, dtype=np.float64)
    if not 0 < epsilon < 1:
        raise ValueError("epsilon must lie in (0, 1)")
    if len(p_prime) == 0:
        raise NonPositiveProbability("empty sampling weights")
    if not np.all(np.isfinite(p_prime)) or np.any(p_prime <= 0):
        raise NonPositiveProbability("sampling weights must be positive and finite")
    t = float(p_prime.sum())
    p = p_prime / t
    return SamplingPlan(p_prime, t, draw_count(t, epsilon, C_s), p, float(C_s), float(epsilon))


def sample_counts(plan: SamplingPlan, rng=None) -> np.ndarray:
    """How often each edge is drawn in ``q`` independent draws from ``p``.

    Drawing the counts jointly from the multinomial has the same law as the
    draw-by-draw loop and costs O(m) instead of O(q).
    """
    rng = as_generator(rng)
    p = plan.p / plan.p.sum()
    return rng.multinomial(plan.q, p)


def sample(G: WeightedGraph, plan: SamplingPlan, rng=None) -> WeightedGraph:
    """Draw ``q`` edges; an edge drawn ``c`` times gets weight ``c * w_e / (p_e q)``."""
    if plan.m != G.m:
        raise DimensionMismatch(f"plan covers {plan.m} edges, graph has {G.m}")
    counts = sample_counts(plan, rng)
    keep = counts > 0
    w = counts[keep] * G.w[keep] / (plan.p[keep] * plan.q)
    return WeightedGraph(G.n, G.u[keep], G.v[keep], w)


def oversample_sparsify(G: WeightedGraph, p_prime, epsilon: float, C_s: float = DEFAULT_C_S, rng=None) -> WeightedGraph:
    """Sparsify G by sampling with weights ``p_prime``.

    The result is a (1 +- epsilon) sparsifier with high probability provided
    ``p_prime[e] >= w_e R(e)`` for every edge; this is not checked here.
    """
    plan = make_plan(p_prime, epsilon, C_s)
    return sample(G, plan, rng)
