"""Direction-split diffusion solvers for the implicit heat scheme and 2nd-order ODEs.

Heat equation ``u_t = u_xx`` on ``[0, 1]`` with the implicit (backward Euler)
scheme.  Written as a stencil on the (time, space) lattice, row ``t`` depends on
row ``t-1`` with weight ``1/(1+2k)`` and on its two spatial neighbours with
weight ``k/(1+2k)`` each, ``k = dt/dx**2``; nothing flows backwards in time.
The solver therefore pushes a whole row forward in time once and then relaxes
the spatial direction exactly with the catalyst profile, row by row.

Second-order ODE ``y'' + alpha y' + beta y = f`` with a central second
difference and a backward first difference; the resulting 1D recurrence is
solved by a single catalyst row pass.
"""

from __future__ import annotations

import math
import time
import warnings
from dataclasses import dataclass
from typing import Callable, NamedTuple

import numpy as np

from . import engine
from .baselines import tridiagonal_solve
from .catalyst import apply_profile_row, make_profile
from .errors import ComplexRootsError, InvalidInputError, SingularDiscretizationError
from .report import SolveReport
from .stencil import GridProblem, StencilWeights, assemble_system, embed_solution

__all__ = [
    "HeatProblem",
    "Ode2Discretization",
    "Ode2Problem",
    "StabilityBoundWarning",
    "discretize_ode2",
    "heat_coefficients",
    "heat_grid_problem",
    "heat_reference",
    "heat_scheme_residual",
    "ode2_grid_problem",
    "ode2_reference",
    "ode2_stability_bound",
    "solve_heat_directional",
    "solve_ode2",
]

# site passes per interior site in one row distribution:
# forward running sum, backward running sum, combine with boundary correction
ROW_PASSES = 3


class StabilityBoundWarning(UserWarning):
    pass


def heat_coefficients(k: float) -> StencilWeights:
    """Space-time stencil of the implicit scheme: ``(a_time, 0, a_x, a_x)``."""
    k = float(k)
    if not (k > 0 and math.isfinite(k)):
        raise InvalidInputError(f"k must be positive and finite, got {k}")
    a_x = k / (1.0 + 2.0 * k)
    return StencilWeights(a_east=1.0 / (1.0 + 2.0 * k), a_west=0.0, a_north=a_x, a_south=a_x)


def _per_time(values, T, name):
    arr = np.broadcast_to(np.asarray(values, dtype=float), (T + 1,)).copy()
    if not np.all(np.isfinite(arr)):
        raise InvalidInputError(f"non-finite {name} boundary values")
    return arr


@dataclass(frozen=True, eq=False)
class HeatProblem:
    """``lx`` spatial intervals (sites ``0..lx``), ``T`` implicit steps of size ``dt``.

    ``left``/``right`` are the boundary temperatures, a scalar or one value per
    time level ``0..T``.  The default initial profile is ``sin(pi x)``.
    """

    lx: int
    T: int
    dt: float
    u0: np.ndarray = None
    left: np.ndarray = 0.0
    right: np.ndarray = 0.0

    def __post_init__(self):
        if self.lx < 2 or self.T < 1:
            raise InvalidInputError("need lx >= 2 spatial intervals and T >= 1 time steps")
        if not self.dt > 0:
            raise InvalidInputError("dt must be positive")
        x = np.linspace(0.0, 1.0, self.lx + 1)
        u0 = np.sin(np.pi * x) if self.u0 is None else self.u0
        u0 = np.array(u0(x) if callable(u0) else u0, dtype=float)
        if u0.shape != (self.lx + 1,):
            raise InvalidInputError(f"u0 must have {self.lx + 1} samples")
        object.__setattr__(self, "u0", u0)
        object.__setattr__(self, "left", _per_time(self.left, self.T, "left"))
        object.__setattr__(self, "right", _per_time(self.right, self.T, "right"))

    @classmethod
    def from_k(cls, k, lx, T, **kw):
        dx = 1.0 / lx
        return cls(lx=lx, T=T, dt=float(k) * dx * dx, **kw)

    @property
    def dx(self):
        return 1.0 / self.lx

    @property
    def k(self):
        return self.dt / self.dx ** 2

    @property
    def x(self):
        return np.linspace(0.0, 1.0, self.lx + 1)

    @property
    def t(self):
        return self.dt * np.arange(self.T + 1)


def heat_grid_problem(problem: HeatProblem) -> GridProblem:
    """Full space-time lattice; time is the first axis.

    The lattice has one extra time row after ``T`` to close the frame; it is
    never read because the stencil has no backward-in-time weight.
    """
    T, lx = problem.T, problem.lx
    g = np.zeros((T + 2, lx + 1))
    g[0] = problem.u0
    g[1:T + 1, 0] = problem.left[1:]
    g[1:T + 1, lx] = problem.right[1:]
    return GridProblem((T + 2, lx + 1), heat_coefficients(problem.k), boundary_values=g)


def heat_field_from_grid(problem: HeatProblem, field_):
    return np.asarray(field_)[: problem.T + 1]


def solve_heat_directional(problem: HeatProblem, tolerance: float = 1e-9, method: str = "auto"):
    """Time-march with one forward push per row and an exact spatial relaxation.

    For ``t = 1..T`` the fluid row is ``a_time * U[t-1]`` on the interior (plus
    the spatial boundary inflow ``a_x * g``); its complete spatial diffusion,
    obtained in closed form, is ``U[t]``.  Returns ``(U, report)`` with ``U`` of
    shape ``(T + 1, lx + 1)``.
    """
    w = heat_coefficients(problem.k)
    a_time, a_x = w.a_east, w.a_north
    profile = make_profile(a_x, a_x)
    lx, T = problem.lx, problem.T
    U = np.empty((T + 1, lx + 1))
    U[0] = problem.u0
    row = np.zeros(lx + 1)
    t0 = time.perf_counter_ns()
    for t in range(1, T + 1):
        row[1:lx] = a_time * U[t - 1, 1:lx]
        row[1] += a_x * problem.left[t]
        row[lx - 1] += a_x * problem.right[t]
        U[t] = apply_profile_row(row, profile, tolerance=tolerance, method=method)
        U[t, 0] = problem.left[t]
        U[t, lx] = problem.right[t]
    wall = time.perf_counter_ns() - t0

    res = _fixed_point_defect(U, a_time, a_x)
    dim = T * (lx - 1)
    ops = ROW_PASSES * dim
    l1 = float(np.abs(res).sum())
    report = SolveReport(
        solver="di-directional",
        converged=l1 <= tolerance,
        ops=ops,
        sweeps=ops / dim,
        l1=l1,
        linf=float(np.abs(res).max()),
        wall_ns=wall,
        tolerance=tolerance,
        tolerance_norm="l1",
        solution=U,
        notes={"row_applies": T, "method": method},
        peak_memory_bytes=int(U.nbytes + 2 * row.nbytes),
    )
    return U, report


def _fixed_point_defect(U, a_time, a_x):
    """``B + P X - X`` of the space-time system, i.e. the fluid left on each site."""
    return (a_time * U[:-1, 1:-1] + a_x * (U[1:, 2:] + U[1:, :-2])) - U[1:, 1:-1]


def heat_scheme_residual(problem: HeatProblem, U) -> np.ndarray:
    """``(U[t,n] - U[t-1,n]) / dt - (U[t,n+1] + U[t,n-1] - 2 U[t,n]) / dx**2``."""
    U = np.asarray(U, dtype=float)
    dt, dx = problem.dt, problem.dx
    lap = (U[1:, 2:] + U[1:, :-2] - 2.0 * U[1:, 1:-1]) / dx ** 2
    return (U[1:, 1:-1] - U[:-1, 1:-1]) / dt - lap


def heat_reference(problem: HeatProblem) -> np.ndarray:
    """Implicit time stepping with a Thomas solve per row."""
    k, lx, T = problem.k, problem.lx, problem.T
    n = lx - 1
    U = np.empty((T + 1, lx + 1))
    U[0] = problem.u0
    lower = np.full(n - 1, -k)
    diag = np.full(n, 1.0 + 2.0 * k)
    upper = np.full(n - 1, -k)
    for t in range(1, T + 1):
        rhs = U[t - 1, 1:lx].copy()
        rhs[0] += k * problem.left[t]
        rhs[-1] += k * problem.right[t]
        U[t, 1:lx] = tridiagonal_solve(lower, diag, upper, rhs)
        U[t, 0] = problem.left[t]
        U[t, lx] = problem.right[t]
    return U


# ---------------------------------------------------------------------------
# second-order ODE

@dataclass(frozen=True, eq=False)
class Ode2Problem:
    """``y'' + alpha y' + beta y = f`` on ``[0, length]`` with Dirichlet ends."""

    alpha: float
    beta: float
    rhs: Callable | np.ndarray | float
    dx: float
    length: float = 1.0
    y0: float = 0.0
    yL: float = 0.0

    def __post_init__(self):
        if not self.dx > 0 or not self.length > 0:
            raise InvalidInputError("dx and length must be positive")
        n = self.length / self.dx
        if abs(n - round(n)) > 1e-9 * max(n, 1.0) or round(n) < 2:
            raise InvalidInputError(f"length/dx = {n} must be an integer >= 2")

    @property
    def n(self):
        return int(round(self.length / self.dx))

    @property
    def x(self):
        return np.linspace(0.0, self.length, self.n + 1)

    def f_samples(self):
        x = self.x
        if callable(self.rhs):
            f = np.asarray(self.rhs(x), dtype=float)
            f = np.broadcast_to(f, x.shape).copy()
        else:
            f = np.broadcast_to(np.asarray(self.rhs, dtype=float), x.shape).copy()
        if not np.all(np.isfinite(f)):
            raise InvalidInputError("non-finite right-hand side")
        return f


class Ode2Discretization(NamedTuple):
    weights: StencilWeights
    gamma: float
    B: np.ndarray


def ode2_stability_bound(alpha, beta):
    """``min(2|alpha|/|beta|, 1/|alpha|, 1/sqrt|beta|)``; zero-denominator terms dropped."""
    terms = []
    if beta != 0:
        terms += [2 * abs(alpha) / abs(beta), 1 / math.sqrt(abs(beta))]
    if alpha != 0:
        terms.append(1 / abs(alpha))
    return min(terms) if terms else math.inf


def discretize_ode2(problem: Ode2Problem) -> Ode2Discretization:
    """Solve the difference equation for ``y(n)``.

    ``y(n) = a_minus y(n+1) + a_plus y(n-1) - gamma f(n)`` with pivot
    ``p = 2 - alpha dx - beta dx**2``, ``a_minus = 1/p``,
    ``a_plus = (1 - alpha dx)/p`` and ``gamma = dx**2/p``.  ``B`` holds the
    interior fluid ``-gamma f`` plus the inflow from ``y0`` and ``yL``.
    """
    a, b, dx = float(problem.alpha), float(problem.beta), float(problem.dx)
    pivot = 2.0 - a * dx - b * dx * dx
    if abs(pivot) < 1e-14:
        raise SingularDiscretizationError(f"pivot 2 - alpha dx - beta dx^2 = {pivot:.3g} vanishes")
    bound = ode2_stability_bound(a, b)
    if dx > bound:
        warnings.warn(f"dx = {dx:g} exceeds the sufficient stability bound {bound:g}",
                      StabilityBoundWarning, stacklevel=2)
    a_minus = 1.0 / pivot
    a_plus = (1.0 - a * dx) / pivot
    gamma = dx * dx / pivot
    f = problem.f_samples()
    B = -gamma * f[1:-1]
    B[0] += a_plus * problem.y0
    B[-1] += a_minus * problem.yL
    return Ode2Discretization(StencilWeights.one_d(a_plus, a_minus), gamma, B)


def ode2_grid_problem(problem: Ode2Problem) -> GridProblem:
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", StabilityBoundWarning)
        w, gamma, _ = discretize_ode2(problem)
    n = problem.n
    src = np.zeros(n + 1)
    src[1:n] = -gamma * problem.f_samples()[1:n]
    g = np.zeros(n + 1)
    g[0], g[n] = problem.y0, problem.yL
    return GridProblem((n + 1,), w, source=src, boundary_values=g)


def solve_ode2(problem: Ode2Problem, tolerance: float = 1e-12, max_ops: int = 50_000_000):
    """One catalyst row pass over all interior fluid; returns ``(y, report)``.

    Complex catalyst roots (``4 a_plus a_minus > 1``) fall back to a sweep
    D-iteration of the same system, flagged in ``report.notes["fallback"]``.
    """
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always", StabilityBoundWarning)
        w, gamma, B = discretize_ode2(problem)
    for c in caught:
        warnings.warn_explicit(c.message, c.category, c.filename, c.lineno)
    n = problem.n
    y = np.zeros(n + 1)
    y[0], y[n] = problem.y0, problem.yL
    t0 = time.perf_counter_ns()
    notes = {"fallback": False, "stability_bound_ok": not caught,
             "a_plus": w.a_plus, "a_minus": w.a_minus, "gamma": gamma}
    try:
        profile = make_profile(w.a_plus, w.a_minus)
    except ComplexRootsError:
        system = assemble_system(ode2_grid_problem(problem))
        state = engine.init_fluid(system)
        sub = engine.run(state, system, engine.Schedule("sweep", tolerance, max_ops))
        y = embed_solution(ode2_grid_problem(problem), system, state.H)
        sub.solver = "di-sweep(fallback)"
        sub.solution = y
        sub.notes.update(notes, fallback=True)
        return y, sub
    row = np.zeros(n + 1)
    row[1:n] = B
    y[1:n] = apply_profile_row(row, profile, tolerance=tolerance)[1:n]
    wall = time.perf_counter_ns() - t0
    res = B + w.a_minus * y[2:] + w.a_plus * y[:-2] - y[1:-1]
    ops = ROW_PASSES * (n - 1)
    l1 = float(np.abs(res).sum())
    return y, SolveReport(
        solver="di-directional", converged=l1 <= tolerance, ops=ops, sweeps=float(ROW_PASSES),
        l1=l1, linf=float(np.abs(res).max()), wall_ns=wall, tolerance=tolerance,
        tolerance_norm="l1", solution=y, notes=notes, peak_memory_bytes=int(3 * y.nbytes),
    )


def ode2_reference(problem: Ode2Problem) -> np.ndarray:
    """Thomas solve of the same difference equation."""
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", StabilityBoundWarning)
        w, _, B = discretize_ode2(problem)
    m = problem.n - 1
    y = np.zeros(problem.n + 1)
    y[0], y[-1] = problem.y0, problem.yL
    y[1:-1] = tridiagonal_solve(np.full(m - 1, -w.a_plus), np.ones(m), np.full(m - 1, -w.a_minus), B)
    return y
