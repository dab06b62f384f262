"""D-iteration: diffusion of a fluid vector F into a history vector H.

Starting from ``H = 0`` and ``F = B``, one elementary diffusion on site ``i``
moves ``F[i]`` into ``H[i]`` and pushes ``P[v, i] * F[i]`` to every interior
neighbour ``v``; fluid pushed towards a boundary site is absorbed.  The identity
``F = B + (P - I) H`` holds after every step, so ``H`` converges to the fixed
point of ``X = P X + B`` as the fluid drains.
"""

from __future__ import annotations

import time
from dataclasses import dataclass, field

import numpy as np

from . import _kernels
from .errors import InvalidInputError, NumericalFailureError
from .report import SolveReport
from .stencil import LinearSystem

__all__ = [
    "FluidState",
    "Schedule",
    "diffuse_site",
    "identity_error",
    "init_fluid",
    "residual_norm",
    "run",
]

STRATEGIES = ("sweep", "greedy", "custom")


@dataclass
class FluidState:
    H: np.ndarray
    F: np.ndarray
    op_count: int = 0
    # next site of the cyclic sweep, kept so that repeated ``run`` calls resume
    cursor: int = 0


@dataclass(frozen=True)
class Schedule:
    strategy: str = "sweep"
    tolerance: float = 1e-9
    max_ops: int = 10_000_000
    sequence: tuple = field(default=())

    def __post_init__(self):
        if self.strategy not in STRATEGIES:
            raise InvalidInputError(f"unknown strategy {self.strategy!r}; expected one of {STRATEGIES}")
        if not self.tolerance > 0:
            raise InvalidInputError("tolerance must be positive")
        if self.max_ops < 1:
            raise InvalidInputError("max_ops must be at least 1")
        if self.strategy == "custom" and len(self.sequence) == 0:
            raise InvalidInputError("custom schedule needs a nonempty site sequence")


def init_fluid(system: LinearSystem) -> FluidState:
    return FluidState(H=np.zeros(system.dimension), F=np.array(system.B, dtype=float))


def residual_norm(state: FluidState) -> float:
    """Remaining fluid, ``sum |F|``."""
    return float(np.abs(state.F).sum())


def identity_error(state: FluidState, system: LinearSystem) -> float:
    """``|F - (B + (P - I) H)|_inf``; zero in exact arithmetic."""
    return float(np.max(np.abs(state.F - system.residual(state.H)), initial=0.0))


def diffuse_site(state: FluidState, system: LinearSystem, site: int) -> FluidState:
    if not 0 <= site < system.dimension:
        raise IndexError(f"site {site} out of range for dimension {system.dimension}")
    _kernels.diffuse_sequence(state.H, state.F, system.push, system.weights,
                              np.array([site], dtype=np.int64))
    state.op_count += 1
    return state


def _sample(state, ops, dim, t0):
    F = state.F
    # overflow surfaces as a non-finite L1 and is raised by the caller
    with np.errstate(over="ignore", invalid="ignore"):
        l1 = float(np.abs(F).sum())
    return (ops, ops / dim, l1, float(np.max(np.abs(F), initial=0.0)), time.perf_counter_ns() - t0)


def run(state: FluidState, system: LinearSystem, schedule: Schedule = Schedule(),
        solver_id: str | None = None) -> SolveReport:
    """Diffuse until ``sum |F| <= tolerance`` or ``op_count`` reaches ``max_ops``.

    The residual is sampled (and convergence tested) every ``dimension``
    operations, i.e. once per sweep-equivalent.  Running out of operations gives
    a report with ``converged=False``; it does not raise.
    """
    dim = system.dimension
    solver_id = solver_id or f"di-{schedule.strategy}"
    t0 = time.perf_counter_ns()
    ops0 = state.op_count
    trace = [_sample(state, state.op_count, max(dim, 1), t0)]
    converged = trace[0][2] <= schedule.tolerance

    heap = pos = seq = None
    if schedule.strategy == "greedy" and dim:
        heap = np.empty(dim, dtype=np.int64)
        pos = np.empty(dim, dtype=np.int64)
        _kernels.heap_build(state.F, heap, pos)
    elif schedule.strategy == "custom":
        seq = np.asarray(schedule.sequence, dtype=np.int64)
        if seq.min() < 0 or seq.max() >= dim:
            raise IndexError("custom schedule names a site outside the system")
        seq_at = state.cursor % seq.size

    while not converged and state.op_count < schedule.max_ops:
        chunk = min(dim, schedule.max_ops - state.op_count)
        if schedule.strategy == "sweep":
            state.cursor = int(_kernels.sweep_chunk(state.H, state.F, system.push, system.weights,
                                                    state.cursor % dim, chunk))
            done = chunk
        elif schedule.strategy == "greedy":
            done = int(_kernels.greedy_chunk(state.H, state.F, system.push, system.weights,
                                             heap, pos, chunk))
        else:
            idx = (seq_at + np.arange(chunk)) % seq.size
            _kernels.diffuse_sequence(state.H, state.F, system.push, system.weights, seq[idx])
            seq_at = int((seq_at + chunk) % seq.size)
            state.cursor = seq_at
            done = chunk
        state.op_count += done
        sample = _sample(state, state.op_count, dim, t0)
        if not np.isfinite(sample[2]):
            raise NumericalFailureError(f"non-finite fluid after {state.op_count} operations")
        trace.append(sample)
        converged = sample[2] <= schedule.tolerance
        if schedule.strategy == "greedy" and done < chunk:
            # the heap ran dry: every site holds exactly zero fluid
            break

    wall = time.perf_counter_ns() - t0
    ops = state.op_count - ops0
    return SolveReport(
        solver=solver_id,
        converged=bool(converged),
        ops=ops,
        sweeps=ops / max(dim, 1),
        l1=trace[-1][2],
        linf=trace[-1][3],
        wall_ns=wall,
        tolerance=schedule.tolerance,
        tolerance_norm="l1",
        solution=state.H.copy(),
        trace=trace,
        notes={"backend": _kernels.BACKEND, "strategy": schedule.strategy},
        peak_memory_bytes=int(state.H.nbytes + state.F.nbytes + system.push.nbytes
                              + (0 if heap is None else heap.nbytes + pos.nbytes)),
    )
