"""Per-run solver records and their CSV serialisations."""

from __future__ import annotations

import csv
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

TRACE_COLUMNS = ("ops", "sweep_equiv", "l1_residual", "linf_residual", "wall_ns")


@dataclass
class SolveReport:
    solver: str
    converged: bool
    ops: int
    sweeps: float
    l1: float
    linf: float
    wall_ns: int
    tolerance: float
    # which residual norm ``tolerance`` bounds: "l1" (remaining fluid) or
    # "linf" (last sweep update, row-based methods)
    tolerance_norm: str = "l1"
    solution: np.ndarray | None = None
    trace: list = field(default_factory=list)
    notes: dict = field(default_factory=dict)
    peak_memory_bytes: int = 0
    artifacts: list = field(default_factory=list)

    @property
    def wall_ms(self):
        return self.wall_ns / 1e6

    def consistent(self):
        """converged implies the tracked residual is within tolerance."""
        if not self.converged:
            return True
        if self.tolerance_norm == "l1":
            return self.l1 <= self.tolerance
        return min(self.notes.get("last_update", self.linf), self.linf) <= self.tolerance

    def summary_line(self):
        return (
            f"solver={self.solver} converged={str(self.converged).lower()} ops={self.ops} "
            f"sweeps={self.sweeps:g} l1={self.l1:.6g} wall_ms={self.wall_ms:.3f}"
        )

    def write_trace(self, path):
        write_trace_csv(path, self.trace)
        self.artifacts.append(str(path))
        return path


def write_trace_csv(path, trace):
    path = Path(path)
    with path.open("w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(TRACE_COLUMNS)
        for ops, sweeps, l1, linf, wall in trace:
            writer.writerow([int(ops), repr(float(sweeps)), repr(float(l1)), repr(float(linf)), int(wall)])
    return path


def read_trace_csv(path):
    with Path(path).open(newline="") as fh:
        reader = csv.DictReader(fh)
        return [
            (int(r["ops"]), float(r["sweep_equiv"]), float(r["l1_residual"]),
             float(r["linf_residual"]), int(r["wall_ns"]))
            for r in reader
        ]
