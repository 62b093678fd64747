"""End-to-end sparsification pipelines.

Every pipeline returns a :class:`SparsifierResult` whose stage log records,
per stage, the parameter used (kappa or epsilon), edge counts and wall time.
Stages whose output is composed into the final graph carry an ``eps``; the
product of their ``(1 +- eps)`` factors must stay within the target.
"""

from __future__ import annotations

import math
import time
from dataclasses import dataclass, field

import numpy as np

from .config import Constants
from .errors import Disconnected, NotUnweighted, SubgraphMismatch, TreeNotSubgraph
from .graph import WeightedGraph
from .lst import fast_low_stretch_tree, low_stretch_tree
from .resistance import approx_resistances, build_sketch
from .rng import Streams
from .sampler import draw_count, make_plan, sample, sample_counts
from .solver import prepare_solver
from .trees import (
    SpanningTree,
    compute_stretches,
    locate_edges,
    scale_spine,
    spine_kappa,
    tree_edges_in,
    tree_resistances,
)


@dataclass
class Stage:
    name: str
    param: str
    edges_in: int
    edges_out: int
    seconds: float
    eps: float | None = None
    note: str = ""


@dataclass
class SparsifierResult:
    G_tilde: WeightedGraph
    epsilon: float
    stages: list = field(default_factory=list)
    seed: int | None = None
    algorithm: str = ""
    constants: dict = field(default_factory=dict)
    extras: dict = field(default_factory=dict, repr=False)

    @property
    def edge_count(self) -> int:
        return self.G_tilde.m

    def eps_bounds(self) -> tuple[float, float]:
        lo = hi = 1.0
        for s in self.stages:
            if s.eps is not None:
                lo *= 1.0 - s.eps
                hi *= 1.0 + s.eps
        return lo, hi

    def bookkeeping_ok(self) -> bool:
        lo, hi = self.eps_bounds()
        return lo >= 1.0 - self.epsilon - 1e-12 and hi <= 1.0 + self.epsilon + 1e-12


class _Log:
    def __init__(self):
        self.stages = []

    def add(self, name, param, m_in, m_out, t0, eps=None, note=""):
        self.stages.append(Stage(name, param, int(m_in), int(m_out), time.perf_counter() - t0, eps, note))


def _consts(constants):
    if constants is None:
        return Constants()
    if isinstance(constants, dict):
        return Constants().with_overrides(constants)
    return constants


def _require_connected(G):
    if not G.is_connected():
        raise Disconnected("sparsification needs a connected graph")


def _is_tree(G):
    return G.m == G.n - 1


def _tree_exit(G, epsilon, streams, name, consts):
    log = _Log()
    log.add("tree-input", "passthrough", G.m, G.m, time.perf_counter(), eps=0.0, note="input is a tree")
    return SparsifierResult(G, epsilon, log.stages, streams.seed, name, consts.as_dict())


def _general_target(n, epsilon, consts):
    # edge budget of the general algorithm at accuracy epsilon
    t = (n - 1) * (1 + consts.eps_resistance) / (1 - consts.eps_resistance)
    return draw_count(t, epsilon, consts.C_s)


def _split_eps(epsilon, t_first, m, n, consts):
    """Accuracy for the first sampling pass and whether to re-sparsify afterwards.

    Re-sparsifying only pays off when the first pass would leave more edges
    than the general algorithm at epsilon/3 produces; then the budget is split
    as epsilon/2 and epsilon/3, whose product stays within 1 +- epsilon.
    """
    first = min(draw_count(t_first, epsilon / 2, consts.C_s), m)
    if first > _general_target(n, epsilon / 3, consts):
        return epsilon / 2, True
    return epsilon, False


def _resolve_subgraph(G, S):
    """Boolean mask over G's edges marking the subgraph S."""
    if isinstance(S, SpanningTree):
        try:
            idx = tree_edges_in(G, S)
        except TreeNotSubgraph as exc:
            raise SubgraphMismatch(str(exc)) from exc
    elif isinstance(S, WeightedGraph):
        if S.n != G.n:
            raise SubgraphMismatch("subgraph has a different vertex count")
        idx = locate_edges(G, S.u, S.v)
        if np.any(idx < 0):
            raise SubgraphMismatch("subgraph contains an edge missing from the graph")
    else:
        arr = np.asarray(S)
        if arr.dtype == bool:
            if arr.shape != (G.m,):
                raise SubgraphMismatch("mask length differs from the edge count")
            return arr.copy()
        idx = arr.astype(np.int64)
        if idx.size and (idx.min() < 0 or idx.max() >= G.m):
            raise SubgraphMismatch("edge index out of range")
    mask = np.zeros(G.m, dtype=bool)
    mask[idx] = True
    return mask


# ---------------------------------------------------------------------------
# incremental sparsifier
# ---------------------------------------------------------------------------


@dataclass
class IncrementalInfo:
    kappa: float
    t: float
    q: int
    s_edges: int
    predicted_edges: float


def incremental_spectral_sparsifier(
    G: WeightedGraph,
    S,
    stretches,
    kappa: float,
    *,
    epsilon: float = 1.0 / 3.0,
    C_s: float = 4.0,
    rng=None,
    return_info: bool = False,
):
    """Return ``(H, I)`` with ``H = G + kappa S`` and ``H <= I <= 2H`` w.h.p.

    ``S`` is a subgraph of G (a SpanningTree, a WeightedGraph, an edge mask
    or an index array); ``stretches`` are upper bounds on ``st_S(e)``, either
    per edge or one number for all edges. S-edges are kept with their boosted
    weight. Every other edge is sampled with ``p'_e = st_S(e) / kappa`` at
    accuracy ``epsilon``, and the sample is scaled by ``1 / (1 - epsilon)``,
    so ``epsilon = 1/3`` gives the factor 2.
    """
    if kappa <= 0:
        raise ValueError("kappa must be positive")
    mask = _resolve_subgraph(G, S)
    st = np.broadcast_to(np.asarray(stretches, dtype=np.float64), (G.m,))
    w_h = np.where(mask, G.w * (1.0 + kappa), G.w)
    H = G.with_weights(w_h)

    off = np.flatnonzero(~mask)
    on = np.flatnonzero(mask)
    scale = 1.0 / (1.0 - epsilon)
    if len(off) == 0:
        I = H.scaled(scale)
        info = IncrementalInfo(kappa, 0.0, 0, len(on), float(len(on)))
    else:
        plan = make_plan(st[off] / kappa, epsilon, C_s)
        counts = sample_counts(plan, rng)
        hit = counts > 0
        sel = off[hit]
        w_s = counts[hit] * G.w[sel] / (plan.p[hit] * plan.q)
        keep = np.concatenate([on, sel])
        w_i = np.concatenate([w_h[on], w_s]) * scale
        order = np.argsort(keep, kind="stable")
        keep = keep[order]
        I = WeightedGraph(G.n, G.u[keep], G.v[keep], w_i[order])
        pred = len(on) + C_s / epsilon**2 * plan.t * math.log(max(plan.t, 2.0))
        info = IncrementalInfo(kappa, plan.t, plan.q, len(on), pred)
    if return_info:
        return H, I, info
    return H, I


# ---------------------------------------------------------------------------
# spanner
# ---------------------------------------------------------------------------


@dataclass
class SpannerResult:
    graph: WeightedGraph
    edges: np.ndarray  # indices into the host graph
    stretch_bound: int


def build_spanner(G: WeightedGraph, k: int | None = None, rng=None) -> SpannerResult:
    """Clustered (2k-1)-spanner of an unweighted graph, k = ceil(log2 n) by default.

    Rounds 1..k-1 sample surviving clusters with probability n^(-1/k); a
    vertex next to a sampled cluster joins it through one edge, any other
    vertex keeps one edge to every neighbouring cluster and leaves. A final
    pass links every vertex to each neighbouring cluster once.
    """
    if not G.is_unweighted():
        raise NotUnweighted("spanner construction expects unit weights")
    rng = Streams(rng)("spanner") if not isinstance(rng, np.random.Generator) else rng
    n = G.n
    if k is None:
        k = max(1, math.ceil(math.log2(max(n, 2))))
    indptr, nbr, eid = G.adjacency()
    indptr = indptr.tolist()
    nbr = nbr.tolist()
    eid = eid.tolist()
    alive = [True] * G.m
    added = [False] * G.m
    cluster = list(range(n))
    p_keep = n ** (-1.0 / k)

    for _ in range(k - 1):
        centers = sorted({c for c in cluster if c >= 0})
        draws = rng.random(len(centers)).tolist()
        sampled = {c for c, r in zip(centers, draws) if r < p_keep}
        new = [c if c in sampled else -1 for c in cluster]
        for x in range(n):
            if cluster[x] < 0 or cluster[x] in sampled:
                continue
            first_edge = {}
            for j in range(indptr[x], indptr[x + 1]):
                e = eid[j]
                if not alive[e]:
                    continue
                c = cluster[nbr[j]]
                if c >= 0 and c not in first_edge:
                    first_edge[c] = e
            hit = [c for c in first_edge if c in sampled]
            if hit:
                c_star = min(hit, key=lambda c: first_edge[c])
                added[first_edge[c_star]] = True
                new[x] = c_star
                for j in range(indptr[x], indptr[x + 1]):
                    if cluster[nbr[j]] == c_star:
                        alive[eid[j]] = False
            else:
                for e in first_edge.values():
                    added[e] = True
                for j in range(indptr[x], indptr[x + 1]):
                    alive[eid[j]] = False
        cluster = new
        ul, vl = G.u.tolist(), G.v.tolist()
        for e in range(G.m):
            if alive[e] and cluster[ul[e]] >= 0 and cluster[ul[e]] == cluster[vl[e]]:
                alive[e] = False

    for x in range(n):
        seen = set()
        for j in range(indptr[x], indptr[x + 1]):
            e = eid[j]
            if not alive[e]:
                continue
            c = cluster[nbr[j]]
            if c not in seen:
                seen.add(c)
                added[e] = True

    idx = np.flatnonzero(np.array(added, dtype=bool))
    S = G.subgraph(idx)
    bound = 1 if len(idx) == G.m else 2 * k - 1
    return SpannerResult(S, idx, bound)


# ---------------------------------------------------------------------------
# resistance-based pipelines
# ---------------------------------------------------------------------------


def _sample_stage(G, p_prime, eps, C_s, rng, log, name):
    t0 = time.perf_counter()
    plan = make_plan(p_prime, eps, C_s)
    out = sample(G, plan, rng)
    log.add(name, f"eps={eps:.6g}", G.m, out.m, t0, eps=eps, note=f"t={plan.t:.6g} q={plan.q}")
    return out, plan


def _finish(G_s, epsilon, first_eps, resparsify, streams, consts, log, solver):
    if not resparsify:
        return G_s
    t0 = time.perf_counter()
    sub = sparsify_general(G_s, epsilon / 3.0, seed=streams.sub("resparsify"), constants=consts, solver=solver)
    for s in sub.stages:
        s.name = "resparsify/" + s.name
    log.stages.extend(sub.stages)
    return sub.G_tilde


def sparsify_general(
    G: WeightedGraph, epsilon: float = 0.5, *, seed=None, constants=None, solver: str = "pcg-tree"
) -> SparsifierResult:
    """Sample by approximate effective resistances from a projection sketch."""
    consts = _consts(constants)
    streams = Streams(seed)
    _require_connected(G)
    if _is_tree(G):
        return _tree_exit(G, epsilon, streams, "general", consts)
    log = _Log()
    eps_r = consts.eps_resistance

    t0 = time.perf_counter()
    h = prepare_solver(G, eps_r / 8.0, solver, rng=streams("solver"))
    sk = build_sketch(G, eps_r, h, c_jl=consts.c_jl, rng=streams("sketch"))
    R = approx_resistances(sk, G)
    log.add("sketch", f"eps_r={eps_r:.6g}", G.m, G.m, t0, note=f"k={sk.k} mode={sk.mode} iters={sk.iterations}")

    p_prime = G.w * R / (1.0 - eps_r)
    out, _ = _sample_stage(G, p_prime, epsilon, consts.C_s, streams("sample"), log, "sample")
    return SparsifierResult(out, epsilon, log.stages, streams.seed, "general", consts.as_dict())


def sparsify_spine_heavy(
    G: WeightedGraph,
    epsilon: float = 0.5,
    *,
    seed=None,
    constants=None,
    tree: SpanningTree | None = None,
    resparsify: bool | None = None,
) -> SparsifierResult:
    """Boost a low-stretch tree so the graph becomes spine-heavy, then sample.

    Resistances are estimated on the boosted graph H (cheap to precondition
    with the boosted tree) and scaled back up by kappa, which keeps them
    upper bounds for G.
    """
    consts = _consts(constants)
    streams = Streams(seed)
    _require_connected(G)
    if _is_tree(G):
        return _tree_exit(G, epsilon, streams, "spine", consts)
    log = _Log()
    eps_r = consts.eps_resistance

    t0 = time.perf_counter()
    T = low_stretch_tree(G, rng=streams("lst")) if tree is None else tree
    st = compute_stretches(G, T)
    st_total = float(st.sum())
    kappa = spine_kappa(st_total, G.n, G.m, consts.c_spine)
    H = scale_spine(G, T, kappa)
    log.add("spine", f"kappa={kappa:.6g}", G.m, H.m, t0, note=f"stretch={st_total:.6g}")

    t0 = time.perf_counter()
    h = prepare_solver(H, eps_r / 8.0, "pcg-tree", tree=T.scaled(kappa))
    sk = build_sketch(H, eps_r, h, c_jl=consts.c_jl, rng=streams("sketch"))
    R_h = approx_resistances(sk, H)
    log.add("sketch", f"eps_r={eps_r:.6g}", H.m, H.m, t0, note=f"k={sk.k} mode={sk.mode} iters={sk.iterations}")

    p_prime = kappa * G.w * R_h / (1.0 - eps_r)
    t_first = float(p_prime.sum())
    eps1, again = _split_eps(epsilon, t_first, G.m, G.n, consts)
    if resparsify is not None:
        again = resparsify
        eps1 = epsilon / 2 if again else epsilon
    out, plan = _sample_stage(G, p_prime, eps1, consts.C_s, streams("sample"), log, "sample")
    out = _finish(out, epsilon, eps1, again, streams, consts, log, "pcg-tree")
    res = SparsifierResult(out, epsilon, log.stages, streams.seed, "spine", consts.as_dict())
    res.extras.update(kappa=kappa, t=plan.t, tree_stretch=st_total)
    return res


def leverage(
    H: WeightedGraph,
    H_prime_sparse: WeightedGraph,
    kappa: float,
    epsilon: float,
    *,
    seed=None,
    constants=None,
    resparsify: bool | None = None,
) -> SparsifierResult:
    """Sparsify H using a sparse 4-approximation of a kappa-approximation of H.

    Contract: there is H' with ``H' <= H <= kappa H'`` and
    ``H' <= H_prime_sparse <= 4 H'``. A low-stretch tree T of the sparse
    graph then gives ``w_e R^H(e) <= 4 w_e R^T(e)``, and the total of these
    bounds is at most ``4 kappa st_T(H_prime_sparse)``.
    """
    consts = _consts(constants)
    streams = Streams(seed)
    _require_connected(H)
    if H_prime_sparse.n != H.n:
        raise SubgraphMismatch("graphs have different vertex sets")
    log = _Log()

    t0 = time.perf_counter()
    T = low_stretch_tree(H_prime_sparse, rng=streams("lst"))
    st_sparse = float(compute_stretches(H_prime_sparse, T).sum())
    R_T = tree_resistances(T, np.column_stack([H.u, H.v]))
    p_prime = 4.0 * H.w * R_T
    t_total = float(p_prime.sum())
    budget = 4.0 * kappa * st_sparse
    log.add(
        "leverage-tree",
        f"kappa={kappa:.6g}",
        H_prime_sparse.m,
        H.m,
        t0,
        note=f"t={t_total:.6g} budget={budget:.6g}",
    )
    eps1, again = _split_eps(epsilon, t_total, H.m, H.n, consts)
    if resparsify is not None:
        again = resparsify
        eps1 = epsilon / 2 if again else epsilon
    out, _ = _sample_stage(H, p_prime, eps1, consts.C_s, streams("sample"), log, "leverage-sample")
    out = _finish(out, epsilon, eps1, again, streams, consts, log, "pcg-tree")
    res = SparsifierResult(out, epsilon, log.stages, streams.seed, "leverage", consts.as_dict())
    res.extras.update(t=t_total, budget=budget, tree_stretch_sparse=st_sparse)
    return res


def _four_approx(I, consts, streams, log, name):
    """Sparsify an incremental sparsifier I and scale it into ``[I, 2I]``."""
    eps_s = 1.0 / 3.0
    t0 = time.perf_counter()
    sub = sparsify_spine_heavy(I, eps_s, seed=streams.sub(name), constants=consts, resparsify=False)
    out = sub.G_tilde.scaled(1.0 / (1.0 - eps_s))
    log.add(name, f"eps={eps_s:.6g} scale={1 / (1 - eps_s):.6g}", I.m, out.m, t0)
    return out


def _kappa1(n, consts):
    return max(1.0, consts.c_kappa1 * math.log(max(n, 2)) ** 5)


def sparsify_linear(G: WeightedGraph, epsilon: float = 0.5, *, seed=None, constants=None) -> SparsifierResult:
    """Tree boost, incremental sparsifier, spine-heavy sparsification, then leverage onto G.

    With ``H = G + kappa_1 T`` and an incremental sparsifier I of H, the
    graph ``X = 1.5 * sparsify(I, 1/3)`` satisfies ``H <= X <= 4H``. Since
    ``H / (1 + kappa_1) <= G <= H``, leveraging G with
    ``X / (1 + kappa_1)`` and kappa ``1 + kappa_1`` meets the contract.
    """
    consts = _consts(constants)
    streams = Streams(seed)
    _require_connected(G)
    if _is_tree(G):
        return _tree_exit(G, epsilon, streams, "linear", consts)
    log = _Log()

    t0 = time.perf_counter()
    T = fast_low_stretch_tree(G, rng=streams("lst"), c_rho=consts.c_rho, c_scale=consts.c_scale)
    st = compute_stretches(G, T)
    log.add("fast-lst", "", G.m, G.n - 1, t0, note=f"stretch={float(st.sum()):.6g}")

    kappa1 = _kappa1(G.n, consts)
    t0 = time.perf_counter()
    H, I, info = incremental_spectral_sparsifier(
        G, T, st, kappa1, epsilon=consts.eps_incremental, C_s=consts.C_s, rng=streams("incremental"), return_info=True
    )
    log.add("incremental", f"kappa={kappa1:.6g}", G.m, I.m, t0, note=f"t={info.t:.6g} q={info.q}")

    X = _four_approx(I, consts, streams, log, "sparsify-I")
    lev = leverage(G, X.scaled(1.0 / (1.0 + kappa1)), 1.0 + kappa1, epsilon, seed=streams.sub("leverage"), constants=consts)
    log.stages.extend(lev.stages)
    res = SparsifierResult(lev.G_tilde, epsilon, log.stages, streams.seed, "linear", consts.as_dict())
    res.extras.update(kappa1=kappa1, leverage=lev.extras)
    return res


def sparsify_unweighted(G: WeightedGraph, epsilon: float = 0.5, *, seed=None, constants=None) -> SparsifierResult:
    """Spanner in place of the low-stretch tree, boost kappa_2 = c ln^3 n, then as in the linear pipeline."""
    consts = _consts(constants)
    if not G.is_unweighted():
        raise NotUnweighted("sparsify_unweighted expects unit weights")
    streams = Streams(seed)
    _require_connected(G)
    if _is_tree(G):
        return _tree_exit(G, epsilon, streams, "unweighted", consts)
    log = _Log()

    t0 = time.perf_counter()
    sp = build_spanner(G, rng=streams("spanner"))
    log.add("spanner", f"stretch_bound={sp.stretch_bound}", G.m, sp.graph.m, t0)

    kappa2 = max(1.0, consts.c_kappa2 * math.log(max(G.n, 2)) ** 3)
    t0 = time.perf_counter()
    st = np.where(np.isin(np.arange(G.m), sp.edges), 1.0, float(sp.stretch_bound))
    H, I, info = incremental_spectral_sparsifier(
        G, sp.edges, st, kappa2, epsilon=consts.eps_incremental, C_s=consts.C_s, rng=streams("incremental"), return_info=True
    )
    log.add("incremental", f"kappa={kappa2:.6g}", G.m, I.m, t0, note=f"t={info.t:.6g} q={info.q}")

    X = _four_approx(I, consts, streams, log, "sparsify-I")
    lev = leverage(G, X.scaled(1.0 / (1.0 + kappa2)), 1.0 + kappa2, epsilon, seed=streams.sub("leverage"), constants=consts)
    log.stages.extend(lev.stages)
    res = SparsifierResult(lev.G_tilde, epsilon, log.stages, streams.seed, "unweighted", consts.as_dict())
    res.extras.update(kappa2=kappa2, stretch_bound=sp.stretch_bound)
    return res


def sparsify_chain(
    G: WeightedGraph, epsilon: float = 0.5, *, seed=None, constants=None, keep_intermediates: bool = False
) -> SparsifierResult:
    """Halve the tree boost level by level, leveraging each sparsifier into the next.

    ``H_i = G + (kappa_1 / 2^i) T`` for ``i = 0..t`` with ``t = ceil(log2 kappa_1)``,
    so consecutive levels are 2-approximations of each other. Each
    intermediate is a (1 +- 1/2) sparsifier scaled by 2, hence a
    3-approximation of its level. The last step leverages G itself with
    kappa ``1 + kappa_1 / 2^t <= 2``.
    """
    consts = _consts(constants)
    streams = Streams(seed)
    _require_connected(G)
    if _is_tree(G):
        return _tree_exit(G, epsilon, streams, "chain", consts)
    log = _Log()

    t0 = time.perf_counter()
    T = fast_low_stretch_tree(G, rng=streams("lst"), c_rho=consts.c_rho, c_scale=consts.c_scale)
    st = compute_stretches(G, T)
    tidx = tree_edges_in(G, T)
    log.add("fast-lst", "", G.m, G.n - 1, t0, note=f"stretch={float(st.sum()):.6g}")

    kappa1 = _kappa1(G.n, consts)
    levels = max(0, math.ceil(math.log2(kappa1)))
    boosts = [kappa1 / 2.0**i for i in range(levels + 1)]

    def level(c):
        w = G.w.copy()
        w[tidx] *= 1.0 + c
        return G.with_weights(w)

    t0 = time.perf_counter()
    H0, I0 = incremental_spectral_sparsifier(
        G, T, st, boosts[0], epsilon=consts.eps_incremental, C_s=consts.C_s, rng=streams("incremental")
    )
    log.add("incremental", f"kappa={boosts[0]:.6g}", G.m, I0.m, t0)
    X = _four_approx(I0, consts, streams, log, "sparsify-I")
    inter = [(H0, X)] if keep_intermediates else []

    for i in range(1, levels + 1):
        Hi = level(boosts[i])
        t0 = time.perf_counter()
        lev = leverage(Hi, X.scaled(0.5), 2.0, 0.5, seed=streams.sub(f"level{i}"), constants=consts, resparsify=False)
        X = lev.G_tilde.scaled(2.0)
        log.add(f"level{i}", f"boost={boosts[i]:.6g} kappa=2 eps=0.5 scale=2", Hi.m, X.m, t0)
        if keep_intermediates:
            inter.append((Hi, X))

    c_last = boosts[-1]
    lev = leverage(G, X.scaled(1.0 / (1.0 + c_last)), 1.0 + c_last, epsilon, seed=streams.sub("final"), constants=consts)
    log.stages.extend(lev.stages)
    res = SparsifierResult(lev.G_tilde, epsilon, log.stages, streams.seed, "chain", consts.as_dict())
    res.extras.update(kappa1=kappa1, levels=levels, boosts=boosts)
    if keep_intermediates:
        res.extras["intermediates"] = inter
    return res


PIPELINES = {
    "general": sparsify_general,
    "spine": sparsify_spine_heavy,
    "linear": sparsify_linear,
    "unweighted": sparsify_unweighted,
    "chain": sparsify_chain,
}


def sparsify(G: WeightedGraph, epsilon: float = 0.5, algorithm: str = "general", **kwargs) -> SparsifierResult:
    try:
        fn = PIPELINES[algorithm]
    except KeyError:
        raise ValueError(f"unknown algorithm {algorithm!r}; choose from {sorted(PIPELINES)}") from None
    return fn(G, epsilon, **kwargs)
