"""Approximate Fiedler vectors: sparsify, then run inverse power iteration."""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import Disconnected, MaxIterationsExceeded, ZeroDegree
from .graph import WeightedGraph
from .rng import Streams
from .solver import SolverHandle, prepare_solver, solve


@dataclass
class EigenResult:
    vector: np.ndarray
    rayleigh: float  # on the input graph
    iterations: int
    epsilon: float
    normalized: bool = False
    rayleigh_sparse: float | None = None  # on the graph that was iterated on
    history: list = field(default_factory=list)
    sparsifier: object = field(default=None, repr=False)


def _unit(x):
    return x / np.linalg.norm(x)


def _orth(x, basis):
    for b in basis:
        x = x - (b @ x) * b
    return x


def inverse_power(
    G: WeightedGraph,
    epsilon: float,
    solver=None,
    *,
    degrees=None,
    deflate=(),
    rng=None,
    c_iter: float = 10.0,
) -> EigenResult:
    """Inverse power iteration for the smallest nonzero eigenpair of L_G.

    With ``degrees`` set, iterates on ``D^{-1/2} L_G D^{-1/2}`` using those
    degrees instead. ``deflate`` lists extra unit vectors to stay orthogonal
    to (hook for further eigenvectors; the kernel is always removed).
    Stops once the Rayleigh quotient changes by less than ``epsilon / 10``
    (relative) three times in a row.
    """
    if not G.is_connected():
        raise Disconnected("inverse power iteration needs a connected graph")
    n = G.n
    if n < 2:
        raise ValueError("need at least two vertices")
    rng = Streams(rng)("start") if not isinstance(rng, np.random.Generator) else rng
    if not isinstance(solver, SolverHandle):
        solver = prepare_solver(G, min(0.05, epsilon / 10.0), solver or "pcg-tree", rng=rng)

    if degrees is None:
        null = np.full(n, 1.0 / math.sqrt(n))
        s = None
    else:
        d = np.asarray(degrees, dtype=np.float64)
        s = np.sqrt(d)
        null = _unit(s)
    basis = [null] + [_unit(np.asarray(b, float)) for b in deflate]

    def quotient(y):
        z = y if s is None else y / s
        return G.quadratic_form(z)

    x = _unit(_orth(rng.standard_normal(n), basis))
    cap = max(3, math.ceil(c_iter * math.log(n) * math.log(1.0 / epsilon)))
    hist = [quotient(x)]
    calm = 0
    for it in range(1, cap + 1):
        if s is None:
            y = solve(solver, x)
        else:
            y = s * solve(solver, s * x)
        x = _unit(_orth(_orth(y, basis), basis))
        r = quotient(x)
        calm = calm + 1 if abs(r - hist[-1]) <= (epsilon / 10.0) * abs(r) else 0
        hist.append(r)
        if calm >= 3:
            return EigenResult(x, r, it, epsilon, s is not None, r, hist)
    raise MaxIterationsExceeded(
        f"inverse power iteration did not settle in {cap} iterations",
        residual=abs(hist[-1] - hist[-2]) / abs(hist[-1]),
        iterations=cap,
    )


def _sparsified(G, epsilon, algorithm, seed, constants, sparsify):
    if not sparsify:
        return G, None
    from .pipelines import sparsify as run

    res = run(G, epsilon / 2.0, algorithm, seed=seed, constants=constants)
    return res.G_tilde, res


def fiedler(
    G: WeightedGraph,
    epsilon: float = 0.5,
    *,
    algorithm: str = "general",
    seed=None,
    constants=None,
    solver: str = "pcg-tree",
    sparsify: bool = True,
) -> EigenResult:
    """Unit vector orthogonal to 1 whose Rayleigh quotient on G approximates lambda_2.

    Sparsifies at epsilon/2, iterates on the sparsifier at epsilon/3 and
    reports the Rayleigh quotient on the original G.
    """
    if not G.is_connected():
        raise Disconnected("fiedler vector needs a connected graph")
    streams = Streams(seed)
    Gt, res = _sparsified(G, epsilon, algorithm, streams.sub("sparsify"), constants, sparsify)
    h = prepare_solver(Gt, min(0.05, epsilon / 30.0), solver, rng=streams("solver"))
    out = inverse_power(Gt, epsilon / 3.0, h, rng=streams("start"))
    out.rayleigh_sparse = out.rayleigh
    out.rayleigh = G.quadratic_form(out.vector)
    out.epsilon = epsilon
    out.sparsifier = res
    return out


def fiedler_normalized(
    G: WeightedGraph,
    epsilon: float = 0.5,
    *,
    algorithm: str = "general",
    seed=None,
    constants=None,
    solver: str = "pcg-tree",
    sparsify: bool = True,
) -> EigenResult:
    """As :func:`fiedler` for ``D^{-1/2} L D^{-1/2}``, with D always taken from the input G."""
    d = G.weighted_degrees()
    if np.any(d <= 0):
        raise ZeroDegree("normalized Laplacian needs every vertex to have an edge")
    if not G.is_connected():
        raise Disconnected("fiedler vector needs a connected graph")
    streams = Streams(seed)
    Gt, res = _sparsified(G, epsilon, algorithm, streams.sub("sparsify"), constants, sparsify)
    h = prepare_solver(Gt, min(0.05, epsilon / 30.0), solver, rng=streams("solver"))
    out = inverse_power(Gt, epsilon / 3.0, h, degrees=d, rng=streams("start"))
    out.rayleigh_sparse = out.rayleigh
    out.rayleigh = G.quadratic_form(out.vector / np.sqrt(d))
    out.epsilon = epsilon
    out.sparsifier = res
    return out
