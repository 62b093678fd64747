"""Command line interface.

Exit codes: 0 success, 1 algorithmic failure (verification failed, solver
did not converge, input violates an algorithm's precondition), 2 usage or
parse errors.
"""

from __future__ import annotations

import argparse
import sys
import time

import numpy as np

from .config import ALGORITHMS, Constants, RunConfig
from .errors import NonPositiveWeight, ParseError, SparsifyError, VertexOutOfRange
from .io import format_report, parse_edge_list, read_vector, write_edge_list, write_result, write_vector

EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2


class _UsageError(Exception):
    pass


def _parse_set(items):
    out = {}
    for item in items or []:
        if "=" not in item:
            raise _UsageError(f"--set expects key=value, got {item!r}")
        k, v = item.split("=", 1)
        try:
            out[k.strip()] = float(v)
        except ValueError:
            raise _UsageError(f"--set {k}: {v!r} is not a number") from None
    try:
        return Constants().with_overrides(out)
    except (KeyError, ValueError) as exc:
        raise _UsageError(str(exc.args[0])) from None


def _config(args) -> RunConfig:
    try:
        return RunConfig(
            epsilon=args.eps,
            algorithm=args.algo if args.command in ("sparsify", "fiedler") else "general",
            seed=args.seed,
            solver=args.solver,
            verify=getattr(args, "verify", False),
            constants=_parse_set(args.set),
            output=getattr(args, "out", None),
        )
    except ValueError as exc:
        raise _UsageError(str(exc)) from None


def _common(p):
    p.add_argument("--eps", type=float, default=0.5, help="target accuracy epsilon in (0, 1)")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--solver", choices=["pcg-tree", "pcg-incremental", "dense"], default="pcg-tree")
    p.add_argument("--set", action="append", metavar="KEY=VALUE", help="override a constant (repeatable)")
    p.add_argument("--threads", type=int, default=1, help="accepted for compatibility; results never depend on it")


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="specsparse", description="Spectral graph sparsification toolkit")
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("sparsify", help="compute a spectral sparsifier")
    p.add_argument("graph")
    p.add_argument("--algo", choices=ALGORITHMS, default="general")
    p.add_argument("--out", required=True)
    p.add_argument("--verify", action="store_true", help="certify the output with the dense oracle")
    _common(p)

    p = sub.add_parser("resistances", help="effective resistance of every edge")
    p.add_argument("graph")
    p.add_argument("--exact", action="store_true", help="dense pseudoinverse instead of the sketch")
    p.add_argument("--out", required=True)
    _common(p)

    p = sub.add_parser("lst", help="low-stretch spanning tree")
    p.add_argument("graph")
    p.add_argument("--fast", action="store_true", help="build the tree on a cut sparsifier")
    p.add_argument("--out", required=True)
    _common(p)

    p = sub.add_parser("solve", help="solve L x = b")
    p.add_argument("graph")
    p.add_argument("rhs", help="file with one entry of b per line")
    p.add_argument("--delta", type=float, default=1e-6)
    p.add_argument("--out", required=True)
    _common(p)

    p = sub.add_parser("fiedler", help="approximate Fiedler vector")
    p.add_argument("graph")
    p.add_argument("--algo", choices=ALGORITHMS, default="general")
    p.add_argument("--normalized", action="store_true")
    p.add_argument("--out", help="vector file (default: GRAPH.fiedler)")
    _common(p)

    p = sub.add_parser("verify", help="check that H is a (1 +- eps) sparsifier of G")
    p.add_argument("graph")
    p.add_argument("sparsifier")
    p.add_argument("--out")
    _common(p)

    p = sub.add_parser("bench", help="time pipelines on random graphs of growing size")
    p.add_argument("--sizes", default="10000,30000,100000,300000", help="comma separated edge counts")
    p.add_argument("--algo", default="general,linear", help="comma separated pipelines")
    p.add_argument("--density", type=float, default=10.0, help="edges per vertex")
    p.add_argument("--out")
    _common(p)
    return ap


def _cmd_sparsify(args, cfg):
    from .oracle import spectral_approx_check
    from .pipelines import sparsify

    G = parse_edge_list(args.graph)
    res = sparsify(G, cfg.epsilon, cfg.algorithm, seed=cfg.seed, constants=cfg.constants)
    write_result(res, args.out)
    print(f"edges_in: {G.m}\nedges_out: {res.edge_count}")
    if cfg.verify:
        rep = spectral_approx_check(G, res.G_tilde, cfg.epsilon, seed=cfg.seed)
        sys.stdout.write(format_report(rep))
        return EXIT_OK if rep.passed else EXIT_FAIL
    return EXIT_OK


def _cmd_resistances(args, cfg):
    from .oracle import exact_resistances
    from .resistance import approx_resistances, build_sketch
    from .solver import prepare_solver

    G = parse_edge_list(args.graph)
    if args.exact:
        R = exact_resistances(G)
    else:
        eps_r = cfg.constants.eps_resistance
        h = prepare_solver(G, eps_r / 8, cfg.solver, rng=cfg.seed)
        R = approx_resistances(build_sketch(G, eps_r, h, c_jl=cfg.constants.c_jl, seed=cfg.seed), G)
    lines = [f"{a} {b} {float(r)!r}\n" for (a, b, _), r in zip(G.edges(), R)]
    with open(args.out, "w", encoding="utf-8") as fh:
        fh.writelines(lines)
    print(f"sum_w_R: {float(np.dot(G.w, R))!r}")
    return EXIT_OK


def _cmd_lst(args, cfg):
    from .lst import fast_low_stretch_tree, low_stretch_tree
    from .rng import Streams
    from .trees import total_stretch

    G = parse_edge_list(args.graph)
    rng = Streams(cfg.seed)("lst")
    if args.fast:
        T = fast_low_stretch_tree(G, rng=rng, c_rho=cfg.constants.c_rho, c_scale=cfg.constants.c_scale)
    else:
        T = low_stretch_tree(G, rng=rng)
    write_edge_list(T.to_graph(), args.out)
    print(f"stretch: {total_stretch(G, T)!r}\nstretch_per_edge: {total_stretch(G, T) / max(G.m, 1)!r}")
    return EXIT_OK


def _cmd_solve(args, cfg):
    from .solver import prepare_solver, solve

    G = parse_edge_list(args.graph)
    b = read_vector(args.rhs)
    h = prepare_solver(G, args.delta, cfg.solver, rng=cfg.seed)
    x, info = solve(h, b, return_info=True)
    write_vector(x, args.out)
    print(f"iterations: {info.iterations}\nprojected: {str(info.projected).lower()}")
    return EXIT_OK


def _cmd_fiedler(args, cfg):
    from .eigen import fiedler, fiedler_normalized

    G = parse_edge_list(args.graph)
    fn = fiedler_normalized if args.normalized else fiedler
    res = fn(G, cfg.epsilon, algorithm=cfg.algorithm, seed=cfg.seed, constants=cfg.constants, solver=cfg.solver)
    out = args.out or args.graph + ".fiedler"
    write_result(res, out)
    print(f"rayleigh: {res.rayleigh!r}\niterations: {res.iterations}\nvector: {out}")
    return EXIT_OK


def _cmd_verify(args, cfg):
    from .oracle import spectral_approx_check

    G = parse_edge_list(args.graph)
    H = parse_edge_list(args.sparsifier)
    rep = spectral_approx_check(G, H, cfg.epsilon, seed=cfg.seed)
    sys.stdout.write(format_report(rep))
    if args.out:
        write_result(rep, args.out)
    return EXIT_OK if rep.passed else EXIT_FAIL


def run_bench(sizes, algos, density=10.0, seed=0, constants=None, emit=print):
    """Rows ``(algorithm, n, m, stage, seconds)``, one per stage plus a ``total`` row."""
    from .generators import random_sparse
    from .pipelines import PIPELINES
    from .rng import Streams

    streams = Streams(seed)
    rows = []
    for m in sizes:
        n = max(10, int(round(m / density)))
        G = random_sparse(n, m, rng=streams(f"graph{m}"), weights=(1.0, 10.0))
        for algo in algos:
            t0 = time.perf_counter()
            res = PIPELINES[algo](G, 0.5, seed=seed, constants=constants)
            total = time.perf_counter() - t0
            for s in res.stages:
                rows.append((algo, G.n, G.m, s.name, s.seconds))
                emit(f"{algo}\t{G.n}\t{G.m}\t{s.name}\t{s.seconds:.4f}")
            rows.append((algo, G.n, G.m, "total", total))
            emit(f"{algo}\t{G.n}\t{G.m}\ttotal\t{total:.4f}")
    return rows


def _cmd_bench(args, cfg):
    try:
        sizes = [int(float(s)) for s in args.sizes.split(",") if s.strip()]
    except ValueError:
        raise _UsageError(f"bad --sizes {args.sizes!r}") from None
    algos = [a.strip() for a in args.algo.split(",") if a.strip()]
    bad = [a for a in algos if a not in ALGORITHMS]
    if bad:
        raise _UsageError(f"unknown algorithm(s): {', '.join(bad)}")
    lines = ["algorithm\tn\tm\tstage\tseconds"]
    print(lines[0])

    def emit(line):
        lines.append(line)
        print(line, flush=True)

    run_bench(sizes, algos, args.density, cfg.seed, cfg.constants, emit)
    if args.out:
        with open(args.out, "w", encoding="utf-8") as fh:
            fh.write("\n".join(lines) + "\n")
    return EXIT_OK


COMMANDS = {
    "sparsify": _cmd_sparsify,
    "resistances": _cmd_resistances,
    "lst": _cmd_lst,
    "solve": _cmd_solve,
    "fiedler": _cmd_fiedler,
    "verify": _cmd_verify,
    "bench": _cmd_bench,
}


def cli_main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        cfg = _config(args)
        return COMMANDS[args.command](args, cfg)
    except _UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (ParseError, VertexOutOfRange, NonPositiveWeight) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except SparsifyError as exc:
        print(f"failed: {exc}", file=sys.stderr)
        return EXIT_FAIL


def main():
    sys.exit(cli_main())


if __name__ == "__main__":
    main()
