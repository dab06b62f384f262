"""Plain-text problem files and deterministic instance generators.

File format (``#`` starts a comment; blank lines are ignored)::

    dd2d L_n L_m          dd1d L
    alpha e w n s         alpha p m
    f n m value           f n value
    g n m value           g n value

Source (``f``) and boundary (``g``) entries are sparse and default to 0.  The
interior is the lattice minus its outer frame.
"""

from __future__ import annotations

from pathlib import Path

import numpy as np

from .directional import HeatProblem, Ode2Problem, heat_grid_problem, ode2_grid_problem
from .errors import InvalidInputError, ProblemFileError
from .stencil import GridProblem, Stability, StencilWeights, validate_stability

__all__ = ["format_problem", "generate_instance", "parse_problem", "read_problem", "write_problem"]


def _num(tok, lineno, kind=float):
    try:
        v = kind(tok)
    except ValueError:
        raise ProblemFileError(f"expected a number, got {tok!r}", lineno) from None
    if kind is float and not np.isfinite(v):
        raise ProblemFileError(f"non-finite value {tok!r}", lineno)
    return v


def parse_problem(text: str) -> GridProblem:
    shape = None
    weights = None
    src, bnd = {}, {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        key, *args = line.split()
        if key in ("dd2d", "dd1d"):
            if shape is not None:
                raise ProblemFileError("duplicate header", lineno)
            want = 2 if key == "dd2d" else 1
            if len(args) != want:
                raise ProblemFileError(f"{key} takes {want} extent(s)", lineno)
            shape = tuple(_num(a, lineno, int) for a in args)
            if min(shape) < 3:
                raise ProblemFileError("every extent must be at least 3 (frame plus interior)", lineno)
            continue
        if shape is None:
            raise ProblemFileError(f"{key!r} before the dd1d/dd2d header", lineno)
        ndim = len(shape)
        if key == "alpha":
            if weights is not None:
                raise ProblemFileError("duplicate alpha line", lineno)
            if len(args) != 2 * ndim:
                raise ProblemFileError(f"alpha takes {2 * ndim} coefficients", lineno)
            vals = [_num(a, lineno) for a in args]
            weights = StencilWeights(*vals) if ndim == 2 else StencilWeights.one_d(*vals)
        elif key in ("f", "g"):
            if len(args) != ndim + 1:
                raise ProblemFileError(f"{key} takes {ndim} indices and a value", lineno)
            site = tuple(_num(a, lineno, int) for a in args[:ndim])
            if any(not 0 <= s < L for s, L in zip(site, shape)):
                raise ProblemFileError(f"site {site} outside lattice {shape}", lineno)
            inner = all(0 < s < L - 1 for s, L in zip(site, shape))
            if key == "f" and not inner:
                raise ProblemFileError(f"source on boundary site {site}", lineno)
            if key == "g" and inner:
                raise ProblemFileError(f"boundary value on interior site {site}", lineno)
            (src if key == "f" else bnd)[site] = _num(args[-1], lineno)
        else:
            raise ProblemFileError(f"unknown directive {key!r}", lineno)
    if shape is None:
        raise ProblemFileError("missing dd1d/dd2d header")
    if weights is None:
        raise ProblemFileError("missing alpha line")
    return GridProblem(shape, weights, source=src, boundary_values=bnd)


def read_problem(path) -> GridProblem:
    return parse_problem(Path(path).read_text())


def format_problem(problem: GridProblem) -> str:
    w = problem.weights
    if problem.ndim == 2:
        lines = [f"dd2d {problem.shape[0]} {problem.shape[1]}",
                 f"alpha {w.a_east!r} {w.a_west!r} {w.a_north!r} {w.a_south!r}"]
    else:
        lines = [f"dd1d {problem.shape[0]}", f"alpha {w.a_plus!r} {w.a_minus!r}"]
    for key, arr in (("f", problem.source), ("g", problem.boundary_values)):
        for site in zip(*np.nonzero(arr)):
            idx = " ".join(str(int(s)) for s in site)
            lines.append(f"{key} {idx} {float(arr[site])!r}")
    return "\n".join(lines) + "\n"


def write_problem(problem: GridProblem, path):
    Path(path).write_text(format_problem(problem))
    return path


def _random_dd2d(rng, params):
    max_size = int(params.get("max_size", 40))
    mass = float(params.get("mass", 0.95))
    signed = bool(params.get("signed", False))
    L_n, L_m = (int(v) for v in rng.integers(3, max_size + 1, size=2))
    w = rng.uniform(-1.0, 1.0, 4) if signed else rng.uniform(0.0, 1.0, 4)
    total = np.abs(w).sum()
    if total > mass:
        w = w * (mass / total)
    shape = (L_n, L_m)
    src = np.zeros(shape)
    src[1:-1, 1:-1] = rng.uniform(-1.0, 1.0, (L_n - 2, L_m - 2))
    g = rng.uniform(-1.0, 1.0, shape)
    g[1:-1, 1:-1] = 0.0
    return GridProblem(shape, StencilWeights(*map(float, w)), source=src, boundary_values=g)


def generate_instance(kind: str, params: dict | None = None, seed: int = 0,
                      allow_unstable: bool = False) -> GridProblem:
    """Deterministic problem generator.

    ``heat`` (params ``k, lx, t``) builds the space-time lattice of the implicit
    heat scheme with ``sin(pi x)`` initial data and zero ends; ``ode2`` (``alpha,
    beta, n, f, y0, yl``) the 1D difference equation; ``random-dd2d``
    (``max_size, mass, signed``) a random rectangle whose stencil is rescaled to
    total weight ``mass`` (0.95 by default) whenever it exceeds it.
    """
    params = dict(params or {})
    if kind == "heat":
        hp = HeatProblem.from_k(float(params.get("k", 1.0)), int(params.get("lx", 20)),
                                int(params.get("t", 20)))
        problem = heat_grid_problem(hp)
    elif kind == "ode2":
        n = int(params.get("n", 64))
        length = float(params.get("length", 1.0))
        op = Ode2Problem(alpha=float(params.get("alpha", 0.0)), beta=float(params.get("beta", 0.0)),
                         rhs=float(params.get("f", 1.0)), dx=length / n, length=length,
                         y0=float(params.get("y0", 0.0)), yL=float(params.get("yl", 0.0)))
        problem = ode2_grid_problem(op)
    elif kind == "random-dd2d":
        if float(params.get("mass", 0.95)) > 1.0 and not allow_unstable:
            raise InvalidInputError("mass > 1 gives unstable stencils; pass allow_unstable to override")
        problem = _random_dd2d(np.random.default_rng(seed), params)
    else:
        raise InvalidInputError(f"unknown instance kind {kind!r}")
    if validate_stability(problem.weights) is Stability.UNSTABLE and not allow_unstable:
        raise InvalidInputError(f"generated stencil is unstable (total weight "
                                f"{problem.weights.total_mass():.6g}); pass allow_unstable to override")
    return problem
