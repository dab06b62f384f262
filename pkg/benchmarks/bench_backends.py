"""Time the compiled kernels against the pure-Python fallback.

    python benchmarks/bench_backends.py [--lx 60] [--t 60] [--repeat 3]

Each kernel runs on the same space-time heat system with both backends; the
script checks that the outputs are identical and prints the wall time of
each and the speedup.
"""

import argparse
import time

import numpy as np

from diter import _kernels
from diter.problems import generate_instance
from diter.stencil import assemble_system


def _best(fn, repeat):
    best = np.inf
    out = None
    for _ in range(repeat):
        t0 = time.perf_counter()
        out = fn()
        best = min(best, time.perf_counter() - t0)
    return best, out


def cases(system, sweeps):
    dim = system.dimension
    B = np.ascontiguousarray(system.B)

    def sweep(mod):
        H, F = np.zeros(dim), B.copy()
        mod.sweep_chunk(H, F, system.push, system.weights, 0, sweeps * dim)
        return H

    def greedy(mod):
        H, F = np.zeros(dim), B.copy()
        heap, pos = np.empty(dim, dtype=np.int64), np.empty(dim, dtype=np.int64)
        mod.heap_build(F, heap, pos)
        mod.greedy_chunk(H, F, system.push, system.weights, heap, pos, sweeps * dim)
        return H

    def gs(mod):
        X = np.zeros(dim)
        for _ in range(sweeps):
            mod.gs_sweep(X, B, system.pull, system.weights)
        return X

    def jac(mod):
        X, Y = np.zeros(dim), np.empty(dim)
        for _ in range(sweeps):
            mod.jacobi_sweep(X, Y, B, system.pull, system.weights)
            X, Y = Y, X
        return X

    return {"di-sweep": sweep, "di-greedy": greedy, "gs": gs, "jacobi": jac}


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--lx", type=int, default=60)
    ap.add_argument("--t", type=int, default=60)
    ap.add_argument("--sweeps", type=int, default=10)
    ap.add_argument("--repeat", type=int, default=3)
    args = ap.parse_args(argv)

    backends = _kernels.available()
    if "cython" not in backends:
        print("compiled kernels are not built; only the fallback is available")
        return 1
    mods = {name: _kernels.load(name) for name in backends}
    system = assemble_system(generate_instance("heat", {"k": 1.0, "lx": args.lx, "t": args.t}))
    print(f"heat system lx={args.lx} T={args.t}: {system.dimension} sites, {args.sweeps} sweep-equivalents")
    print(f"{'kernel':<10} {'cython_ms':>10} {'python_ms':>10} {'speedup':>8} identical")
    for name, fn in cases(system, args.sweeps).items():
        tc, xc = _best(lambda: fn(mods["cython"]), args.repeat)
        tp, xp = _best(lambda: fn(mods["python"]), 1)
        same = np.array_equal(xc, xp)
        print(f"{name:<10} {tc * 1e3:>10.2f} {tp * 1e3:>10.1f} {tp / tc:>8.0f} {same}")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
