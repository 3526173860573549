"""Command-line interface: ``tensorfunc <subcommand> ...``.

Exit codes: 0 success, 2 invalid input, 3 no convergence, 4 quadrature
saturation.
"""

import argparse
import sys

import numpy as np

from . import netcomm, tcore, tns
from .densefun import EXP, IDENTITY, INVERSE, SQRT, polynomial
from .errors import BackendError, NonConvergenceError, QuadratureSaturationError, TensorFuncError
from .experiment import (
    BENCH_COLUMNS,
    CYCLE_COLUMNS,
    ExperimentConfig,
    apply_scaling,
    plot_convergence,
    run_benchmark,
    run_convergence_experiment,
    write_csv,
)
from .tfunc import BACKENDS, t_exp, t_function

EXIT_OK = 0
EXIT_INVALID = 2
EXIT_NONCONVERGED = 3
EXIT_SATURATED = 4

FUNCTIONS = {
    "exp": EXP,
    "inverse": INVERSE,
    "sqrt": SQRT,
    "identity": IDENTITY,
    "square-plus-double": polynomial([0.0, 2.0, 1.0]),  # z^2 + 2z
}


def _add_krylov(parser):
    g = parser.add_argument_group("krylov backend")
    g.add_argument("--scheme", choices=("classical", "global"), default="classical")
    g.add_argument("--case", choices=("bcirc", "fourier"), default="bcirc")
    g.add_argument("--m", type=int, default=5, help="restart length")
    g.add_argument("--tol", type=float, default=1e-12)
    g.add_argument("--max-cycles", type=int, default=50)
    g.add_argument("--contour", choices=("fixed", "adaptive"), default="fixed")


def _krylov_options(args):
    if args.backend != "krylov":
        return {}
    return dict(scheme=args.scheme, case=args.case, m=args.m, tol=args.tol,
                max_cycles=args.max_cycles, contour=args.contour)


def _add_tensor_io(parser):
    parser.add_argument("tensor", help="TNS3 file holding A (n x n x p)")
    parser.add_argument("--rhs", help="TNS3 file holding B (n x s x p); default: the identity tensor")
    parser.add_argument("--backend", choices=BACKENDS, default="auto")
    parser.add_argument("--out", help="output TNS3 file (default: stdout)")
    parser.add_argument("--sparse", action="store_true", help="write the sparse layout")
    parser.add_argument("--real", action="store_true", help="drop a negligible imaginary part before writing")


def _operands(args):
    a = tns.load_tensor(args.tensor)
    if args.rhs:
        b = tns.load_tensor(args.rhs)
    else:
        b = tcore.identity_tensor(a.shape[0], a.shape[2])
    return a, b


def _emit_tensor(args, x):
    if args.real:
        x = tcore.cast_real(x)
    text = tns.format_tensor(x, sparse=args.sparse)
    if args.out:
        with open(args.out, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def cmd_texp(args):
    a, b = _operands(args)
    _emit_tensor(args, t_exp(a, args.t, b, backend=args.backend, **_krylov_options(args)))


def cmd_tfunc(args):
    a, b = _operands(args)
    f = FUNCTIONS[args.function]
    _emit_tensor(args, t_function(f, a, b, backend=args.backend, **_krylov_options(args)))


def cmd_comm(args):
    adj = netcomm.AdjacencyTensor(tns.load_tensor(args.tensor), args.layers)
    e = netcomm.communicability_tensor(adj, backend=args.backend)
    cent = np.diagonal(e[:, :, 0])
    order = netcomm.rank_nodes(cent)[: args.top_k]
    rows = [("centrality", int(i), int(i), 0, float(cent[i])) for i in order]
    for i, j, k in args.triple or ():
        for name, v, size in (("i", i, adj.n), ("j", j, adj.n), ("k", k, adj.p)):
            if not 0 <= v < size:
                raise IndexError(f"{name}={v} out of range [0, {size})")
        rows.append(("communicability", i, j, k, float(e[i, j, k])))
    if args.format == "csv":
        text = write_csv(rows, ("quantity", "i", "j", "k", "value"))
    else:
        lines = [f"top {len(order)} nodes by centrality exp(A)[i, i, 0]:"]
        lines += [f"  {rank:3d}. node {i:4d}  {v!r}" for rank, (_, i, _, _, v) in enumerate(rows[: len(order)], 1)]
        triples = rows[len(order):]
        if triples:
            lines.append("communicability exp(A)[i, j, k]:")
            lines += [f"  ({i}, {j}, {k})  {v!r}" for _, i, j, k, v in triples]
        text = "\n".join(lines) + "\n"
    if args.out:
        with open(args.out, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def cmd_experiment(args):
    cfg = ExperimentConfig(
        n=args.n, p=args.p, density=args.density, seed=args.seed, m=tuple(args.m), tol=args.tol,
        schemes=tuple(args.scheme), cases=tuple(args.case), max_cycles=args.max_cycles, contour=args.contour,
    )
    result = run_convergence_experiment(cfg)
    write_csv(result.cycle_rows(), CYCLE_COLUMNS, args.out)
    if args.summary:
        write_csv(result.summary_rows()[1:], result.summary_rows()[0], args.summary)
    if args.plot:
        plot_convergence(result, args.plot)
    sys.stdout.write("cycles to converge to tol = %g\n" % cfg.tol)
    sys.stdout.write(result.summary_text())


def cmd_bench(args):
    rows, per_cycle = run_benchmark(n=args.n, p=args.p, m=args.m, cycles=args.cycles,
                                    density=args.density, seed=args.seed)
    lines = [f"{s:9s} {t * 1000:10.2f} ms per cycle" for s, t in per_cycle.items()]
    if args.scaling:
        srows, slope = apply_scaling(tuple(args.scaling), p=args.scaling_p, seed=args.seed)
        rows += srows
        lines.append(f"apply_bcirc time ~ n^{slope:.2f} over n = {args.scaling}")
    write_csv(rows, BENCH_COLUMNS, args.out)
    sys.stdout.write("\n".join(lines) + "\n")


def cmd_gen(args):
    adj = netcomm.random_network_tensor(args.n, args.p, args.density, args.seed)
    text = tns.format_tensor(adj.tensor, sparse=not args.dense)
    if args.out:
        with open(args.out, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _triple(text):
    parts = text.split(",")
    if len(parts) != 3:
        raise argparse.ArgumentTypeError(f"expected i,j,k, got {text!r}")
    return tuple(int(v) for v in parts)


def build_parser():
    parser = argparse.ArgumentParser(prog="tensorfunc", description="Functions of third-order tensors.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("texp", help="t-exponential exp(A t) * B")
    _add_tensor_io(p)
    p.add_argument("--t", type=float, default=1.0, help="time")
    _add_krylov(p)
    p.set_defaults(run=cmd_texp)

    p = sub.add_parser("tfunc", help="t-function f(A) * B")
    _add_tensor_io(p)
    p.add_argument("--function", choices=sorted(FUNCTIONS), default="exp")
    _add_krylov(p)
    p.set_defaults(run=cmd_tfunc)

    p = sub.add_parser("comm", help="centrality and communicability report for an adjacency tensor")
    p.add_argument("tensor", help="TNS3 adjacency tensor")
    p.add_argument("--top-k", type=int, default=10)
    p.add_argument("--triple", type=_triple, action="append", help="i,j,k (zero-based); repeatable")
    p.add_argument("--layers", choices=netcomm.LAYER_KINDS, default="multilayer")
    p.add_argument("--backend", choices=BACKENDS, default="auto")
    p.add_argument("--format", choices=("text", "csv"), default="text")
    p.add_argument("--out")
    p.set_defaults(run=cmd_comm)

    p = sub.add_parser("experiment", help="restart convergence experiment on a random network tensor")
    p.add_argument("--n", type=int, default=50)
    p.add_argument("--p", type=int, default=50)
    p.add_argument("--density", type=float, default=0.1)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--m", type=int, nargs="+", default=[5])
    p.add_argument("--tol", type=float, default=1e-12)
    p.add_argument("--scheme", nargs="+", choices=("classical", "global"), default=["classical", "global"])
    p.add_argument("--case", nargs="+", choices=("bcirc", "fourier"), default=["bcirc", "fourier"])
    p.add_argument("--max-cycles", type=int, default=50)
    p.add_argument("--contour", choices=("fixed", "adaptive"), default="fixed")
    p.add_argument("--backend", choices=("krylov",), default="krylov", help="only krylov is meaningful here")
    p.add_argument("--out", help="per-cycle CSV (default: not written)")
    p.add_argument("--summary", help="cycles-per-m summary CSV")
    p.add_argument("--plot", help="SVG convergence plot (needs matplotlib)")
    p.set_defaults(run=cmd_experiment)

    p = sub.add_parser("bench", help="per-cycle timing of classical vs global")
    p.add_argument("--n", type=int, default=50)
    p.add_argument("--p", type=int, default=50)
    p.add_argument("--m", type=int, default=5)
    p.add_argument("--density", type=float, default=0.1)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--cycles", type=int, default=3)
    p.add_argument("--scaling", type=int, nargs="*", help="also time apply_bcirc for these n")
    p.add_argument("--scaling-p", type=int, default=8)
    p.add_argument("--out", help="timing CSV")
    p.set_defaults(run=cmd_bench)

    p = sub.add_parser("gen", help="write a seeded random network tensor")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--p", type=int, required=True)
    p.add_argument("--density", type=float, default=0.1)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--dense", action="store_true", help="dense layout instead of sparse")
    p.add_argument("--out")
    p.set_defaults(run=cmd_gen)
    return parser


def _failure_code(exc):
    cause = exc.cause if isinstance(exc, BackendError) else exc
    if isinstance(cause, QuadratureSaturationError):
        return EXIT_SATURATED
    if isinstance(cause, NonConvergenceError):
        return EXIT_NONCONVERGED
    return None


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        args.run(args)
    except (TensorFuncError, ValueError, IndexError, OSError) as exc:
        code = _failure_code(exc)
        print(f"tensorfunc {args.command}: {exc}", file=sys.stderr)
        return EXIT_INVALID if code is None else code
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
