"""Command-line entry point.

Exit codes: 0 success, 1 invalid input or usage, 2 failure while computing.
Vertex and row indices are 1-based on the command line and in files.
"""

from __future__ import annotations

import argparse
import csv
import json
import sys

import numpy as np

from . import experiment as ex
from . import graphs, kaczmarz, walks
from .consensus import init_states, run, step
from .errors import ComputationError, ValidationError
from .linalg import build_system, condition_numbers, load_system, phi, read_matrix_csv, read_vector_csv


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(1, f"{self.prog}: error: {message}\n")


def _load(args):
    if getattr(args, "rhs", None):
        return load_system(args.system, args.rhs)
    A = read_matrix_csv(args.system)
    return build_system(A, np.zeros(A.shape[0]))


def _dump_json(obj, path):
    text = json.dumps(obj, indent=2, sort_keys=True)
    if path:
        with open(path, "w") as fh:
            fh.write(text + "\n")
    else:
        print(text)


def cmd_gen_graph(args):
    fam = args.family
    if fam == "er":
        if args.p is None:
            raise ValidationError("er needs --p")
        net = graphs.gen_er(args.n, args.p, args.seed)
    elif fam == "ws":
        if args.k is None or args.p is None:
            raise ValidationError("ws needs --k and --p")
        net = graphs.gen_ws(args.n, args.k, args.p, args.seed)
    elif fam == "sf":
        if args.m is None:
            raise ValidationError("sf needs --m")
        net = graphs.gen_sf(args.n, args.m, args.seed)
    else:
        if args.k is None:
            raise ValidationError("rr needs --k")
        net = graphs.gen_rr(args.n, args.k, args.seed)
    graphs.write_edgelist(args.out, net)


def cmd_solve(args):
    sys_ = load_system(args.system, args.rhs)
    net = graphs.read_edgelist(args.graph)
    trace = run(sys_, net, args.steps, args.stride, args.radius, args.seed)
    trace.write_csv(args.out)


def cmd_bound(args):
    sys_ = _load(args)
    net = graphs.read_edgelist(args.graph)
    if sys_.n != net.n:
        raise ValidationError(f"system has {sys_.n} rows but graph has {net.n} vertices")
    i = args.source - 1
    if not 0 <= i < net.n:
        raise ValidationError(f"--source must lie in [1, {net.n}]")
    if args.t < 0:
        raise ValidationError("--t must be >= 0")
    ens = init_states(sys_, net, args.radius, args.seed)
    y0 = ens.error_norms
    fn = walks.bound_dp if args.mode == "dp" else walks.bound_bruteforce
    report = fn(sys_, net, i, args.t, y0).to_dict()
    for _ in range(args.t + 1):
        ens = step(ens)
    report["source"] = args.source
    report["mode"] = args.mode
    report["measured"] = float(ens.error_norms[i])
    report["y0_norms"] = y0.tolist()
    _dump_json(report, args.out)


def cmd_kaczmarz(args):
    sys_ = load_system(args.system, args.rhs)
    n = sys_.n
    if args.schedule == "cyclic":
        sched = kaczmarz.cyclic_schedule(n, args.sweeps)
    elif args.schedule == "random":
        sched = kaczmarz.random_schedule(n, args.sweeps * n, args.seed)
    else:
        if not args.schedule_file:
            raise ValidationError("--schedule file needs --schedule-file")
        sched = kaczmarz.read_schedule(args.schedule_file)
    if not sched:
        raise ValidationError("empty schedule")
    z0 = np.zeros(n) if args.start == "zero" else sys_.x_star + np.random.default_rng(args.seed).standard_normal(n)
    rep = kaczmarz.verify_sequence_bounds(sys_, sched, z0=z0)
    with open(args.out, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["k", "row", "error"])
        w.writerow([0, "", format(rep.errors[0], ".17g")])
        for k, (j, e) in enumerate(zip(sched, rep.errors[1:]), start=1):
            w.writerow([k, j + 1, format(e, ".17g")])
    _dump_json(
        {
            "order": rep.order,
            "initial_error": rep.initial_error,
            "final_error": rep.final_error,
            "tight": rep.tight,
            "loose": rep.loose,
            "loose_holds": rep.loose_holds,
        },
        None,
    )


def cmd_experiment(args):
    if args.config:
        cfg = ex.load_config(args.config)
    elif args.preset == "full-scale" or args.paper_scale:
        cfg = ex.full_scale_preset()
    else:
        cfg = ex.desk_preset()
    if args.master_seed is not None:
        cfg.master_seed = args.master_seed
    if args.workers is not None:
        cfg.workers = args.workers
    cfg.validate()
    result = ex.run_experiment(cfg)
    ex.write_results_csv(args.out, result.rows)
    ex.write_metadata(args.meta or f"{args.out}.meta.json", result)


def cmd_stats(args):
    net = graphs.read_edgelist(args.graph)
    mean, var, hist = graphs.degree_stats(net)
    out = {
        "n": net.n,
        "edges": net.edge_count,
        "diameter": graphs.diameter(net),
        "mean_degree": mean,
        "mean_degree_no_loops": mean - 1.0,
        "degree_variance": var,
        "degree_histogram": {str(k): v for k, v in hist.items()},
    }
    if args.system:
        A = read_matrix_csv(args.system)
        b = read_vector_csv(args.rhs) if args.rhs else np.zeros(A.shape[0])
        s = build_system(A, b)
        kappa, kappa_s = condition_numbers(s)
        out.update(tau=s.tau, inv_norm=s.inv_norm, phi=phi(s), kappa=kappa, kappa_scaled=kappa_s)
    _dump_json(out, args.out)


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="netlinsolve", description="Projection-consensus solver for Ax=b: networks, walk-order bounds, experiments.")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    g = sub.add_parser("gen-graph", help="sample a random network and write an edge list")
    g.add_argument("--family", choices=("er", "ws", "sf", "rr"), required=True)
    g.add_argument("--n", type=int, required=True, help="number of vertices")
    g.add_argument("--p", type=float, help="ER link probability or WS rewiring probability")
    g.add_argument("--k", type=int, help="WS lattice degree or RR degree")
    g.add_argument("--m", type=int, help="SF edges per arriving vertex")
    g.add_argument("--seed", type=int, default=0)
    g.add_argument("--out", required=True, help="edge-list path")
    g.set_defaults(func=cmd_gen_graph)

    s = sub.add_parser("solve", help="run the projection-consensus iteration and write a trace CSV")
    s.add_argument("--system", required=True, help="CSV matrix A, row-major, no header")
    s.add_argument("--rhs", required=True, help="single-column CSV vector b")
    s.add_argument("--graph", required=True, help="edge-list file")
    s.add_argument("--steps", type=int, required=True, help="number of rounds T")
    s.add_argument("--stride", type=int, default=10, help="checkpoint stride (default 10)")
    s.add_argument("--radius", type=float, default=1.0, help="initial perturbation radius")
    s.add_argument("--seed", type=int, default=0)
    s.add_argument("--out", required=True, help="trace CSV: t, eps_1..eps_n, R")
    s.set_defaults(func=cmd_solve)

    b = sub.add_parser("bound", help="evaluate the walk-order error bound for one agent")
    b.add_argument("--system", required=True, help="CSV matrix A")
    b.add_argument("--rhs", help="optional CSV vector b (the bound does not depend on it)")
    b.add_argument("--graph", required=True, help="edge-list file")
    b.add_argument("--source", type=int, required=True, help="agent index, 1-based")
    b.add_argument("--t", type=int, required=True, help="walk length; bounds |y_i(t+1)|")
    b.add_argument("--mode", choices=("enum", "dp"), default="dp")
    b.add_argument("--radius", type=float, default=1.0, help="initial perturbation radius")
    b.add_argument("--seed", type=int, default=0, help="seed for the initial states")
    b.add_argument("--out", help="report JSON path (stdout if omitted)")
    b.set_defaults(func=cmd_bound)

    k = sub.add_parser("kaczmarz", help="run a row-projection schedule and check its envelope")
    k.add_argument("--system", required=True)
    k.add_argument("--rhs", required=True)
    k.add_argument("--schedule", choices=("cyclic", "random", "file"), default="cyclic")
    k.add_argument("--schedule-file", help="1-based row indices, whitespace or comma separated")
    k.add_argument("--sweeps", type=int, default=1, help="cyclic sweeps, or random length in units of n")
    k.add_argument("--start", choices=("zero", "random"), default="zero", help="starting vector")
    k.add_argument("--seed", type=int, default=0)
    k.add_argument("--out", required=True, help="series CSV: k, row, error")
    k.set_defaults(func=cmd_kaczmarz)

    e = sub.add_parser("experiment", help="run a topology experiment and write quantile CSV")
    src = e.add_mutually_exclusive_group()
    src.add_argument("--config", help="experiment JSON config")
    src.add_argument("--preset", choices=("desk", "full-scale"), help="built-in configuration")
    src.add_argument("--paper-scale", action="store_true", help="same as --preset full-scale (n=100, t_max=2000)")
    e.add_argument("--master-seed", type=int, help="override master_seed")
    e.add_argument("--workers", type=int, help="parallel worker processes")
    e.add_argument("--out", required=True, help="CSV: group,family,params,t,min,q1,median,q3,max")
    e.add_argument("--meta", help="metadata JSON path (default <out>.meta.json)")
    e.set_defaults(func=cmd_experiment)

    st = sub.add_parser("stats", help="print network (and optionally system) statistics")
    st.add_argument("--graph", required=True)
    st.add_argument("--system", help="CSV matrix A")
    st.add_argument("--rhs", help="CSV vector b")
    st.add_argument("--out", help="JSON path (stdout if omitted)")
    st.set_defaults(func=cmd_stats)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return exc.code if isinstance(exc.code, int) else 1
    try:
        args.func(args)
    except ValidationError as exc:
        print(f"netlinsolve {args.command}: error: {exc}", file=sys.stderr)
        return 1
    except (OSError, ValueError) as exc:
        print(f"netlinsolve {args.command}: error: {exc}", file=sys.stderr)
        return 1
    except ComputationError as exc:
        print(f"netlinsolve {args.command}: failed: {exc}", file=sys.stderr)
        return 2
    return 0


if __name__ == "__main__":
    sys.exit(main())
