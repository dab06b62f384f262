"""Command-line front end.

Exit status: 0 when every solve converged, 2 when one did not, 1 on usage or
input errors.
"""

from __future__ import annotations

import argparse
import csv
import sys
from pathlib import Path

import numpy as np

from . import bench as bench_mod
from .catalyst import dump_profile_csv, make_profile
from .directional import HeatProblem, Ode2Problem, heat_reference, ode2_reference
from .errors import DiterError
from .problems import generate_instance, read_problem, write_problem

EXIT_OK, EXIT_ERROR, EXIT_NOT_CONVERGED = 0, 1, 2


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def _csv_list(text):
    return [s.strip() for s in text.split(",") if s.strip()]


def _int_list(text):
    return [int(s) for s in _csv_list(text)]


def build_parser():
    p = _Parser(prog="diter", description="Diffusion-iteration solvers for finite-difference systems.")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def common(sp, solver_default, solvers):
        sp.add_argument("--solver", default=solver_default, choices=solvers)
        sp.add_argument("--tol", type=float, default=1e-9)
        sp.add_argument("--max-work", type=int, default=100_000_000,
                        help="cap on site updates (elementary diffusions or row evaluations)")
        sp.add_argument("--out", default="diter-output", help="output directory")

    grid_solvers = ["di-sweep", "di-greedy", "gs", "jacobi", "direct"]
    s2 = sub.add_parser("solve2d", help="solve a DD1D/DD2D problem file or generated instance")
    src = s2.add_mutually_exclusive_group(required=True)
    src.add_argument("--problem", help="problem file")
    src.add_argument("--generate", choices=["heat", "ode2", "random-dd2d"])
    s2.add_argument("--seed", type=int, default=0)
    s2.add_argument("--allow-unstable", action="store_true")
    common(s2, "di-sweep", grid_solvers)

    sh = sub.add_parser("heat1d", help="implicit heat equation with sin(pi x) initial data")
    sh.add_argument("--k", type=float, default=1.0, help="dt / dx^2")
    sh.add_argument("--lx", type=int, default=100, help="spatial intervals")
    sh.add_argument("--t", type=int, default=200, help="time steps")
    sh.add_argument("--verify", action="store_true", help="compare with tridiagonal time stepping")
    common(sh, "di-directional", ["di-directional"] + grid_solvers)

    so = sub.add_parser("ode2", help="y'' + alpha y' + beta y = f with Dirichlet ends")
    so.add_argument("--alpha", type=float, default=0.0)
    so.add_argument("--beta", type=float, default=0.0)
    so.add_argument("--f", type=float, default=1.0, help="constant right-hand side")
    so.add_argument("--n", type=int, default=64, help="intervals on [0, length]")
    so.add_argument("--length", type=float, default=1.0)
    so.add_argument("--y0", type=float, default=0.0)
    so.add_argument("--yl", type=float, default=0.0)
    so.add_argument("--verify", action="store_true", help="compare with a tridiagonal solve")
    common(so, "di-directional", ["di-directional"] + grid_solvers)

    sc = sub.add_parser("catalyst-dump", help="write n,phi,phi_bounded,phi_tilde")
    sc.add_argument("--a-plus", type=float, required=True)
    sc.add_argument("--a-minus", type=float, required=True)
    sc.add_argument("--n", type=int, default=20, help="bound N of the interval [-N, N]")
    sc.add_argument("--out", default="diter-output")

    sb = sub.add_parser("bench", help="compare solvers on a suite of instances")
    sb.add_argument("--suite", choices=["heat", "ode2", "random"], default="heat")
    sb.add_argument("--solvers", type=_csv_list, default=["di-directional", "gs"])
    sb.add_argument("--tol", type=float, default=1e-8)
    sb.add_argument("--max-work", type=int, default=1_000_000_000)
    sb.add_argument("--k", type=float, default=1.0)
    sb.add_argument("--lx", type=int, default=200)
    sb.add_argument("--t-values", type=_int_list, default=[100, 250, 500])
    sb.add_argument("--n-values", type=_int_list, default=[64, 128, 256])
    sb.add_argument("--alpha", type=float, default=1.0)
    sb.add_argument("--beta", type=float, default=-1.0)
    sb.add_argument("--count", type=int, default=5)
    sb.add_argument("--seed", type=int, default=0)
    sb.add_argument("--parallel", action="store_true")
    sb.add_argument("--gs-stop", choices=["error", "update"], default="error",
                    help="Jacobi/Gauss-Seidel stopping rule")
    sb.add_argument("--out", default="diter-output")

    sg = sub.add_parser("generate", help="write a generated problem file")
    sg.add_argument("--kind", choices=["heat", "ode2", "random-dd2d"], required=True)
    sg.add_argument("--seed", type=int, default=0)
    sg.add_argument("--k", type=float, default=1.0)
    sg.add_argument("--lx", type=int, default=20)
    sg.add_argument("--t", type=int, default=20)
    sg.add_argument("--alpha", type=float, default=0.0)
    sg.add_argument("--beta", type=float, default=0.0)
    sg.add_argument("--n", type=int, default=64)
    sg.add_argument("--mass", type=float, default=0.95)
    sg.add_argument("--max-size", type=int, default=40)
    sg.add_argument("--signed", action="store_true")
    sg.add_argument("--allow-unstable", action="store_true")
    sg.add_argument("--out", required=True, help="problem file to write")
    return p


def _outdir(path):
    d = Path(path)
    d.mkdir(parents=True, exist_ok=True)
    return d


def _finish(report, out, stem):
    report.write_trace(out / f"{stem}_trace.csv")
    print(report.summary_line())
    return EXIT_OK if report.converged else EXIT_NOT_CONVERGED


def _gen_params(args):
    return {"k": args.k, "lx": args.lx, "t": args.t, "alpha": args.alpha, "beta": args.beta,
            "n": args.n, "mass": args.mass, "max_size": args.max_size, "signed": args.signed}


def cmd_solve2d(args):
    if args.problem:
        problem = read_problem(args.problem)
    else:
        problem = generate_instance(args.generate, {}, seed=args.seed, allow_unstable=args.allow_unstable)
    out = _outdir(args.out)
    field, report = bench_mod.solve_grid(problem, args.solver, args.tol, args.max_work)
    path = out / "solve2d_solution.csv"
    with path.open("w", newline="") as fh:
        w = csv.writer(fh)
        if problem.ndim == 2:
            w.writerow(("n", "m", "u"))
            for (n, m), v in np.ndenumerate(field):
                w.writerow((n, m, repr(float(v))))
        else:
            w.writerow(("n", "u"))
            for (n,), v in np.ndenumerate(field):
                w.writerow((n, repr(float(v))))
    report.artifacts.append(str(path))
    return _finish(report, out, f"solve2d_{args.solver}")


def cmd_heat1d(args):
    hp = HeatProblem.from_k(args.k, args.lx, args.t)
    out = _outdir(args.out)
    U, report = bench_mod.solve_heat(hp, args.solver, args.tol, args.max_work)
    path = out / "heat1d_field.csv"
    with path.open("w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(("t", "x", "u"))
        for (ti, xi), v in np.ndenumerate(U):
            w.writerow((repr(float(hp.t[ti])), repr(float(hp.x[xi])), repr(float(v))))
    report.artifacts.append(str(path))
    code = _finish(report, out, f"heat1d_{args.solver}")
    if args.verify:
        err = float(np.max(np.abs(U - heat_reference(hp))))
        print(f"verify max_abs_diff_vs_tridiagonal={err:.3e}")
    return code


def cmd_ode2(args):
    op = Ode2Problem(args.alpha, args.beta, args.f, dx=args.length / args.n, length=args.length,
                     y0=args.y0, yL=args.yl)
    out = _outdir(args.out)
    y, report = bench_mod.solve_ode(op, args.solver, args.tol, args.max_work)
    path = out / "ode2_solution.csv"
    with path.open("w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(("x", "y"))
        for xv, yv in zip(op.x, y):
            w.writerow((repr(float(xv)), repr(float(yv))))
    report.artifacts.append(str(path))
    code = _finish(report, out, f"ode2_{args.solver}")
    if args.verify:
        err = float(np.max(np.abs(y - ode2_reference(op))))
        print(f"verify max_abs_diff_vs_tridiagonal={err:.3e}")
    return code


def cmd_catalyst(args):
    out = _outdir(args.out)
    profile = make_profile(args.a_plus, args.a_minus)
    path = out / "catalyst.csv"
    dump_profile_csv(path, profile, args.n)
    print(f"r_plus={profile.r_plus!r} r_minus={profile.r_minus!r} wrote={path}")
    return EXIT_OK


def cmd_bench(args):
    out = _outdir(args.out)
    params = {"k": args.k, "lx": args.lx, "t_values": args.t_values, "n_values": args.n_values,
              "alpha": args.alpha, "beta": args.beta, "count": args.count}
    rows = bench_mod.bench(args.suite, args.solvers, args.tol, args.max_work, params,
                           seed=args.seed, parallel=args.parallel, stop=args.gs_stop)
    path = bench_mod.write_bench_csv(out / f"bench_{args.suite}.csv", rows)
    for r in rows:
        print(f"instance={r['instance']} {r['report'].summary_line()}")
    discrepancy = {r["instance"]: r["max_pairwise_linf"] for r in rows}
    for inst, disc in discrepancy.items():
        ok = disc <= 10 * args.tol
        print(f"instance={inst} max_pairwise_linf={disc:.3e} agreement={'ok' if ok else 'FAIL'}")
    first = args.solvers[0]
    for other in args.solvers[1:]:
        for inst, ratio in bench_mod.work_ratios(rows, other, first):
            print(f"instance={inst} ops_ratio({other}/{first})={ratio:.2f}")
    print(f"wrote={path}")
    return EXIT_OK if all(r["converged"] for r in rows) else EXIT_NOT_CONVERGED


def cmd_generate(args):
    problem = generate_instance(args.kind, _gen_params(args), seed=args.seed,
                                allow_unstable=args.allow_unstable)
    Path(args.out).parent.mkdir(parents=True, exist_ok=True)
    write_problem(problem, args.out)
    print(f"wrote={args.out} shape={'x'.join(map(str, problem.shape))}")
    return EXIT_OK


COMMANDS = {
    "solve2d": cmd_solve2d,
    "heat1d": cmd_heat1d,
    "ode2": cmd_ode2,
    "catalyst-dump": cmd_catalyst,
    "bench": cmd_bench,
    "generate": cmd_generate,
}


def run_cli(argv=None) -> int:
    try:
        args = build_parser().parse_args(argv)
        return COMMANDS[args.command](args)
    except UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
    except (DiterError, OSError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
    return EXIT_ERROR


def main():
    sys.exit(run_cli())


if __name__ == "__main__":
    main()
