"""Solver dispatch and the DI-vs-row-iteration comparison harness."""

from __future__ import annotations

import csv
import itertools
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path

import numpy as np

from . import engine
from .baselines import BaselineConfig, direct_solve, gauss_seidel, jacobi
from .directional import (
    HeatProblem,
    Ode2Problem,
    heat_field_from_grid,
    heat_grid_problem,
    ode2_grid_problem,
    solve_heat_directional,
    solve_ode2,
)
from .errors import InvalidInputError
from .problems import generate_instance
from .stencil import assemble_system, embed_solution

SOLVERS = ("di-sweep", "di-greedy", "di-directional", "gs", "jacobi", "direct")
BENCH_COLUMNS = ("suite", "instance", "solver", "converged", "ops", "sweeps", "l1", "linf",
                 "wall_ns", "max_pairwise_linf")


def solve_system(system, solver, tolerance=1e-9, max_work=100_000_000, stop="error"):
    """Run one of the lattice-agnostic solvers on an assembled system.

    ``stop`` selects the Jacobi/Gauss-Seidel stopping rule (see ``BaselineConfig``).
    """
    dim = system.dimension
    if solver in ("di-sweep", "di-greedy"):
        state = engine.init_fluid(system)
        sched = engine.Schedule(solver[3:], tolerance, max(int(max_work), 1))
        report = engine.run(state, system, sched)
        return state.H, report
    if solver in ("gs", "jacobi"):
        cfg = BaselineConfig("gauss_seidel" if solver == "gs" else solver, tolerance,
                             max(int(max_work) // max(dim, 1), 1), stop=stop)
        return (gauss_seidel if solver == "gs" else jacobi)(system, cfg)
    if solver == "direct":
        return direct_solve(system)
    raise InvalidInputError(f"solver {solver!r} needs a directional problem (heat1d or ode2)")


def solve_grid(problem, solver, tolerance=1e-9, max_work=100_000_000, stop="error"):
    system = assemble_system(problem)
    x, report = solve_system(system, solver, tolerance, max_work, stop)
    field = embed_solution(problem, system, x)
    report.solution = field
    return field, report


def solve_heat(hp: HeatProblem, solver, tolerance=1e-9, max_work=100_000_000, stop="error"):
    if solver == "di-directional":
        return solve_heat_directional(hp, tolerance)
    field, report = solve_grid(heat_grid_problem(hp), solver, tolerance, max_work, stop)
    U = heat_field_from_grid(hp, field)
    report.solution = U
    return U, report


def solve_ode(op: Ode2Problem, solver, tolerance=1e-9, max_work=100_000_000, stop="error"):
    if solver == "di-directional":
        return solve_ode2(op, tolerance, max_ops=max_work)
    return solve_grid(ode2_grid_problem(op), solver, tolerance, max_work, stop)


def _instances(suite, params, seed):
    if suite == "heat":
        k, lx = float(params.get("k", 1.0)), int(params.get("lx", 200))
        for T in params.get("t_values", (100, 250, 500)):
            yield f"k={k:g},lx={lx},T={T}", ("heat", HeatProblem.from_k(k, lx, int(T)))
    elif suite == "ode2":
        for n in params.get("n_values", (64, 128, 256)):
            op = Ode2Problem(float(params.get("alpha", 1.0)), float(params.get("beta", -1.0)),
                             float(params.get("f", 1.0)), dx=1.0 / n)
            yield f"alpha={op.alpha:g},beta={op.beta:g},n={n}", ("ode2", op)
    elif suite == "random":
        for i in range(int(params.get("count", 5))):
            prob = generate_instance("random-dd2d", params, seed=seed + i)
            yield f"seed={seed + i},shape={prob.shape[0]}x{prob.shape[1]}", ("grid", prob)
    else:
        raise InvalidInputError(f"unknown bench suite {suite!r}")


def _run_instance(suite, name, inst, solvers, tolerance, max_work, stop):
    kind, obj = inst
    outs, rows = {}, []
    for solver in solvers:
        if kind == "heat":
            sol, rep = solve_heat(obj, solver, tolerance, max_work, stop)
        elif kind == "ode2":
            sol, rep = solve_ode(obj, solver, tolerance, max_work, stop)
        else:
            sol, rep = solve_grid(obj, solver, tolerance, max_work, stop)
        outs[solver] = sol
        rows.append(rep)
    disc = max((float(np.max(np.abs(outs[a] - outs[b])))
                for a, b in itertools.combinations(solvers, 2)), default=0.0)
    return [
        {"suite": suite, "instance": name, "solver": solver, "converged": r.converged,
         "ops": r.ops, "sweeps": r.sweeps, "l1": r.l1, "linf": r.linf, "wall_ns": r.wall_ns,
         "max_pairwise_linf": disc, "report": r}
        for solver, r in zip(solvers, rows)
    ]


def bench(suite, solvers, tolerance=1e-8, max_work=1_000_000_000, params=None, seed=0,
          parallel=False, stop="error"):
    """Run every solver on every instance of ``suite``; one row per (instance, solver).

    Each row carries the instance's largest pairwise L-inf discrepancy between
    solver outputs.
    """
    params = dict(params or {})
    for s in solvers:
        if s not in SOLVERS:
            raise InvalidInputError(f"unknown solver {s!r}")
    insts = list(_instances(suite, params, seed))
    if parallel:
        with ThreadPoolExecutor() as pool:
            parts = list(pool.map(lambda it: _run_instance(suite, it[0], it[1], solvers,
                                                           tolerance, max_work, stop), insts))
    else:
        parts = [_run_instance(suite, name, inst, solvers, tolerance, max_work, stop)
                 for name, inst in insts]
    return [row for part in parts for row in part]


def work_ratios(rows, numerator, denominator):
    """``ops(numerator) / ops(denominator)`` per instance, in bench order."""
    by = {}
    for r in rows:
        by.setdefault(r["instance"], {})[r["solver"]] = r["ops"]
    return [(inst, ops[numerator] / ops[denominator]) for inst, ops in by.items()
            if numerator in ops and denominator in ops and ops[denominator] > 0]


def write_bench_csv(path, rows):
    with Path(path).open("w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(BENCH_COLUMNS)
        for r in rows:
            w.writerow([r[c] if not isinstance(r[c], float) else repr(r[c]) for c in BENCH_COLUMNS])
    return path
