"""Row-based ("collection") iterations and direct reference solvers."""

from __future__ import annotations

import time
from dataclasses import dataclass

import numpy as np
import scipy.sparse as sp
import scipy.sparse.linalg as spla

from . import _kernels
from .errors import InvalidInputError, SingularMatrixError
from .report import SolveReport
from .stencil import LinearSystem

__all__ = ["BaselineConfig", "direct_solve", "gauss_seidel", "jacobi", "tridiagonal_solve"]


@dataclass(frozen=True)
class BaselineConfig:
    method: str = "gauss_seidel"
    tolerance: float = 1e-9
    max_sweeps: int = 100_000
    # "update": stop once the sweep update is <= tolerance.
    # "error": additionally require the extrapolated error update * q / (1 - q),
    # q the observed contraction of successive updates, to be <= tolerance.
    stop: str = "error"

    def __post_init__(self):
        if self.stop not in ("update", "error"):
            raise InvalidInputError(f"unknown stopping rule {self.stop!r}")
        if self.method not in ("jacobi", "gauss_seidel"):
            raise InvalidInputError(f"unknown baseline method {self.method!r}")
        if not self.tolerance > 0:
            raise InvalidInputError("tolerance must be positive")
        if self.max_sweeps < 1:
            raise InvalidInputError("max_sweeps must be at least 1")


def _error_estimate(updates):
    if len(updates) < 2:
        return np.inf
    recent = updates[-4:]
    q = max(b / a if a > 0 else 0.0 for a, b in zip(recent, recent[1:]))
    if q >= 1.0:
        return np.inf
    return updates[-1] * q / (1.0 - q)


def _iterate(system, config, step, solver_id):
    dim = system.dimension
    X = np.zeros(dim)
    t0 = time.perf_counter_ns()
    res = system.residual(X)
    trace = [(0, 0.0, float(np.abs(res).sum()), float(np.abs(res).max(initial=0.0)), 0)]
    updates = []
    converged = diverged = False
    sweeps = 0
    while sweeps < config.max_sweeps:
        upd = step(X)
        sweeps += 1
        updates.append(upd)
        res = system.residual(X)
        trace.append((sweeps * dim, float(sweeps), float(np.abs(res).sum()),
                      float(np.abs(res).max(initial=0.0)), time.perf_counter_ns() - t0))
        if not np.isfinite(upd):
            diverged = True
            break
        if trace[-1][3] == 0.0 or (
            min(upd, trace[-1][3]) <= config.tolerance
            and (config.stop == "update" or _error_estimate(updates) <= config.tolerance)
        ):
            converged = True
            break
        if sweeps > 100 and upd > 10.0 * updates[-101]:
            diverged = True
            break
    wall = time.perf_counter_ns() - t0
    report = SolveReport(
        solver=solver_id,
        converged=converged,
        ops=sweeps * dim,
        sweeps=float(sweeps),
        l1=trace[-1][2],
        linf=trace[-1][3],
        wall_ns=wall,
        tolerance=config.tolerance,
        tolerance_norm="linf",
        solution=X,
        trace=trace,
        notes={"backend": _kernels.BACKEND, "updates": updates, "last_update": updates[-1],
               "diverged": diverged},
        peak_memory_bytes=int(2 * X.nbytes + system.pull.nbytes),
    )
    return X, report


def gauss_seidel(system: LinearSystem, config: BaselineConfig = BaselineConfig()):
    """In-place sweeps ``X[i] <- (P X)[i] + B[i]`` in ascending index order.

    Stops when the largest change within a sweep, or the largest entry of the
    residual ``B + P X - X`` after it, is at most ``tolerance`` (and, under the
    default ``stop="error"`` rule, so is the extrapolated distance to the fixed
    point).
    A sweep update that has grown tenfold over the last 100 sweeps marks the
    run as diverged (reported, not raised).
    """
    B = np.ascontiguousarray(system.B)

    def step(X):
        return _kernels.gs_sweep(X, B, system.pull, system.weights)

    return _iterate(system, config, step, "gs")


def jacobi(system: LinearSystem, config: BaselineConfig = BaselineConfig(method="jacobi")):
    B = np.ascontiguousarray(system.B)
    buf = np.empty(system.dimension)

    def step(X):
        upd = _kernels.jacobi_sweep(X, buf, B, system.pull, system.weights)
        X[:] = buf
        return upd

    return _iterate(system, config, step, "jacobi")


def direct_solve(system: LinearSystem):
    """Sparse LU solve of ``(I - P) X = B``."""
    t0 = time.perf_counter_ns()
    A = (sp.identity(system.dimension, format="csc") - system.P.tocsc())
    X = np.atleast_1d(spla.spsolve(A, np.asarray(system.B)))
    wall = time.perf_counter_ns() - t0
    if not np.all(np.isfinite(X)):
        raise SingularMatrixError("I - P is singular")
    res = system.residual(X)
    report = SolveReport(
        solver="direct", converged=True, ops=0, sweeps=0.0,
        l1=float(np.abs(res).sum()), linf=float(np.abs(res).max(initial=0.0)),
        wall_ns=wall, tolerance=np.inf, tolerance_norm="l1", solution=X,
    )
    return X, report


def tridiagonal_solve(lower, diag, upper, rhs):
    """Thomas algorithm for ``lower[i-1] x[i-1] + diag[i] x[i] + upper[i] x[i+1] = rhs[i]``.

    ``lower`` and ``upper`` have length ``n - 1``.  No pivoting; a zero pivot
    raises :class:`SingularMatrixError`.
    """
    b = np.asarray(diag, dtype=float)
    n = b.size
    a = np.asarray(lower, dtype=float)
    c = np.asarray(upper, dtype=float)
    d = np.asarray(rhs, dtype=float)
    if a.size != n - 1 or c.size != n - 1 or d.size != n:
        raise InvalidInputError("tridiagonal bands must have lengths n-1, n, n-1 and rhs n")
    cp = np.empty(max(n - 1, 0))
    dp = np.empty(n)
    piv = b[0]
    if piv == 0.0:
        raise SingularMatrixError("zero pivot at row 0")
    if n > 1:
        cp[0] = c[0] / piv
    dp[0] = d[0] / piv
    for i in range(1, n):
        piv = b[i] - a[i - 1] * cp[i - 1]
        if piv == 0.0:
            raise SingularMatrixError(f"zero pivot at row {i}")
        if i < n - 1:
            cp[i] = c[i] / piv
        dp[i] = (d[i] - a[i - 1] * dp[i - 1]) / piv
    x = np.empty(n)
    x[-1] = dp[-1]
    for i in range(n - 2, -1, -1):
        x[i] = dp[i] - cp[i] * x[i + 1]
    return x
