"""Edge-list and Matrix Market readers, result writers with key:value reports."""

from __future__ import annotations

import os
import warnings

import numpy as np
import scipy.io
import scipy.sparse as sp

from .errors import IoError, NonPositiveWeight, ParseError, VertexOutOfRange
from .graph import WeightedGraph


def _fmt(x) -> str:
    if isinstance(x, (bool, np.bool_)):
        return "true" if x else "false"
    if isinstance(x, (float, np.floating)):
        return repr(float(x))
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    return str(x).replace("\n", " ")


def _parse_number(tok, kind, ln):
    try:
        return kind(tok)
    except ValueError:
        raise ParseError(f"cannot read {tok!r} as {kind.__name__}", ln) from None


def _read_matrix_market(path) -> WeightedGraph:
    try:
        A = sp.coo_matrix(scipy.io.mmread(path))
    except Exception as exc:  # scipy raises a mix of ValueError/IndexError here
        raise ParseError(f"invalid Matrix Market file: {exc}") from exc
    if A.shape[0] != A.shape[1]:
        raise ParseError(f"matrix is {A.shape[0]} x {A.shape[1]}, expected square")
    n = A.shape[0]
    off = A.row != A.col
    r, c, x = A.row[off], A.col[off], A.data[off].astype(np.float64)
    up = r < c
    r, c, x = r[up], c[up], x[up]
    nz = x != 0
    r, c, x = r[nz], c[nz], x[nz]
    if np.all(x < 0):
        w = -x  # Laplacian: off-diagonals are -w
    elif np.all(x > 0):
        w = x  # adjacency
    else:
        raise ParseError("off-diagonal entries have mixed signs; not a Laplacian or an adjacency matrix")
    return WeightedGraph.from_arrays(n, r, c, w)


def parse_edge_list(path) -> WeightedGraph:
    """Read ``n m`` then ``m`` lines ``u v w`` (0-indexed); ``#`` starts a comment.

    Files beginning with ``%%MatrixMarket`` are read as symmetric coordinate
    matrices; a matrix with non-positive off-diagonals is taken as a
    Laplacian, one with non-negative off-diagonals as an adjacency matrix.
    """
    try:
        with open(path, "r", encoding="utf-8") as fh:
            head = fh.read(14)
            if head.startswith("%%MatrixMarket"):
                return _read_matrix_market(path)
            fh.seek(0)
            lines = fh.readlines()
    except OSError as exc:
        raise IoError(str(exc)) from exc

    n = m = None
    u, v, w = [], [], []
    for ln, raw in enumerate(lines, start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        tok = line.split()
        if n is None:
            if len(tok) != 2:
                raise ParseError("header must be 'n m'", ln)
            n = _parse_number(tok[0], int, ln)
            m = _parse_number(tok[1], int, ln)
            if n < 1 or m < 0:
                raise ParseError("header needs n >= 1 and m >= 0", ln)
            continue
        if len(tok) != 3:
            raise ParseError("edge line must be 'u v w'", ln)
        a = _parse_number(tok[0], int, ln)
        b = _parse_number(tok[1], int, ln)
        x = _parse_number(tok[2], float, ln)
        if not (0 <= a < n and 0 <= b < n):
            raise VertexOutOfRange(f"line {ln}: vertex outside [0, {n})")
        if not x > 0 or not np.isfinite(x):
            raise NonPositiveWeight(f"line {ln}: weight {tok[2]} is not positive")
        u.append(a)
        v.append(b)
        w.append(x)
    if n is None:
        raise ParseError("missing 'n m' header")
    if len(u) != m:
        raise ParseError(f"header announces {m} edges, found {len(u)}")
    G = WeightedGraph.from_arrays(n, u, v, w, check=False)
    if G.dropped_self_loops:
        warnings.warn(f"dropped {G.dropped_self_loops} self-loop(s)", stacklevel=2)
    return G


def write_edge_list(G: WeightedGraph, path) -> None:
    lines = [f"{G.n} {G.m}"]
    lines += [f"{a} {b} {_fmt(x)}" for a, b, x in G.edges()]
    _write(path, "\n".join(lines) + "\n")


def write_vector(x, path) -> None:
    _write(path, "".join(f"{_fmt(float(t))}\n" for t in np.asarray(x)))


def read_vector(path) -> np.ndarray:
    try:
        with open(path, "r", encoding="utf-8") as fh:
            vals = []
            for ln, raw in enumerate(fh, start=1):
                line = raw.split("#", 1)[0].strip()
                if line:
                    vals.append(_parse_number(line, float, ln))
    except OSError as exc:
        raise IoError(str(exc)) from exc
    return np.array(vals)


def _write(path, text):
    try:
        with open(path, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
    except OSError as exc:
        raise IoError(str(exc)) from exc


def report_lines(result) -> list[tuple[str, object]]:
    """Flat key:value pairs describing a result; wall times are left out so reports are reproducible."""
    from .eigen import EigenResult
    from .oracle import ApproxReport
    from .pipelines import SparsifierResult

    if isinstance(result, SparsifierResult):
        lo, hi = result.eps_bounds()
        items = [
            ("kind", "sparsifier"),
            ("algorithm", result.algorithm),
            ("seed", result.seed),
            ("epsilon", result.epsilon),
            ("n", result.G_tilde.n),
            ("edges_in", result.stages[0].edges_in if result.stages else result.G_tilde.m),
            ("edges_out", result.G_tilde.m),
            ("eps_product_low", lo),
            ("eps_product_high", hi),
            ("bookkeeping_ok", result.bookkeeping_ok()),
        ]
        items += [(f"constant.{k}", v) for k, v in sorted(result.constants.items())]
        for i, s in enumerate(result.stages):
            p = f"stage.{i}"
            items += [
                (f"{p}.name", s.name),
                (f"{p}.param", s.param),
                (f"{p}.edges_in", s.edges_in),
                (f"{p}.edges_out", s.edges_out),
                (f"{p}.eps", "none" if s.eps is None else s.eps),
                (f"{p}.note", s.note),
            ]
        return items
    if isinstance(result, EigenResult):
        return [
            ("kind", "eigen"),
            ("epsilon", result.epsilon),
            ("normalized", result.normalized),
            ("rayleigh", result.rayleigh),
            ("rayleigh_sparse", "none" if result.rayleigh_sparse is None else result.rayleigh_sparse),
            ("iterations", result.iterations),
            ("n", len(result.vector)),
        ]
    if isinstance(result, ApproxReport):
        return [
            ("kind", "approx"),
            ("seed", "none" if result.seed is None else result.seed),
            ("epsilon", result.epsilon),
            ("pass", result.passed),
            ("lambda_min_ratio", result.lambda_min_ratio),
            ("lambda_max_ratio", result.lambda_max_ratio),
            ("quick_min", result.quick_min),
            ("quick_max", result.quick_max),
            ("n", result.n),
            ("m_in", result.m_in),
            ("m_out", result.m_out),
        ]
    raise TypeError(f"cannot write {type(result).__name__}")


def format_report(result) -> str:
    return "".join(f"{k}: {_fmt(v)}\n" for k, v in report_lines(result))


def read_report(path) -> dict:
    out = {}
    with open(path, "r", encoding="utf-8") as fh:
        for raw in fh:
            if ":" in raw:
                k, v = raw.rstrip("\n").split(":", 1)
                out[k.strip()] = v.strip()
    return out


def write_result(result, path) -> list[str]:
    """Write a result; returns the paths written.

    Sparsifiers: edge list at ``path`` and report at ``path + '.report'``.
    Eigen results: one vector entry per line at ``path`` plus the report.
    Approx reports: the report alone at ``path``.
    """
    from .eigen import EigenResult
    from .pipelines import SparsifierResult

    path = os.fspath(path)
    if isinstance(result, SparsifierResult):
        write_edge_list(result.G_tilde, path)
    elif isinstance(result, EigenResult):
        write_vector(result.vector, path)
    else:
        _write(path, format_report(result))
        return [path]
    _write(path + ".report", format_report(result))
    return [path, path + ".report"]
