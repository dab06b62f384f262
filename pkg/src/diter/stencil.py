"""Stencil problems on 1D/2D lattices and their fixed-point form X = P X + B.

A lattice site carries the affine relation

    U(n, m) = a_east U(n-1, m) + a_west U(n+1, m)
            + a_north U(n, m-1) + a_south U(n, m+1) + f(n, m)

so ``a_east`` is the share a site pushes to its ``+n`` neighbour when viewed as a
diffusion, and similarly for the other three directions.  In 1D only ``a_plus``
(weight carried towards ``+n``) and ``a_minus`` are used; they are stored as
``a_east`` and ``a_west`` of a single-column lattice.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from typing import Mapping

import numpy as np
import scipy.sparse as sp

from .errors import InvalidInputError, MalformedDomainError

__all__ = [
    "DIRECTIONS",
    "GridProblem",
    "LinearSystem",
    "Stability",
    "StencilWeights",
    "assemble_system",
    "dd2d_residual",
    "embed_solution",
    "spectral_radius_estimate",
    "validate_stability",
]

# push offsets, in the order of StencilWeights.as_array()
DIRECTIONS = ((1, 0), (-1, 0), (0, 1), (0, -1))

MARGINAL_TOL = 1e-12


class Stability(enum.Enum):
    STRICT = "strict"
    MARGINAL = "marginal"
    UNSTABLE = "unstable"


@dataclass(frozen=True)
class StencilWeights:
    a_east: float = 0.0
    a_west: float = 0.0
    a_north: float = 0.0
    a_south: float = 0.0
    ndim: int = 2

    @classmethod
    def one_d(cls, a_plus, a_minus):
        return cls(float(a_plus), float(a_minus), 0.0, 0.0, ndim=1)

    @property
    def a_plus(self):
        return self.a_east

    @property
    def a_minus(self):
        return self.a_west

    def as_array(self):
        return np.array([self.a_east, self.a_west, self.a_north, self.a_south], dtype=float)

    def total_mass(self):
        return float(np.abs(self.as_array()).sum())

    @property
    def stable(self):
        return self.total_mass() <= 1.0


def validate_stability(weights: StencilWeights) -> Stability:
    """Classify a stencil by its total absolute weight.

    ``marginal`` means the total is 1 up to 1e-12; such stencils (the implicit
    heat scheme is one) are still solvable when the boundary absorbs fluid, which
    :func:`spectral_radius_estimate` can confirm for a given instance.
    """
    coeffs = weights.as_array()
    if not np.all(np.isfinite(coeffs)):
        raise InvalidInputError(f"non-finite stencil coefficient in {weights}")
    total = float(np.abs(coeffs).sum())
    if abs(total - 1.0) <= MARGINAL_TOL:
        return Stability.MARGINAL
    if total < 1.0:
        return Stability.STRICT
    return Stability.UNSTABLE


def _as_grid(values, shape, name):
    grid = np.zeros(shape, dtype=float)
    if values is None:
        return grid
    if isinstance(values, Mapping):
        for site, v in values.items():
            site = (site,) if np.isscalar(site) else tuple(site)
            if len(site) != len(shape):
                raise InvalidInputError(f"{name}: site {site} does not match lattice rank {len(shape)}")
            if any(not 0 <= s < L for s, L in zip(site, shape)):
                raise InvalidInputError(f"{name}: site {site} outside lattice {shape}")
            grid[site] = float(v)
        return grid
    arr = np.asarray(values, dtype=float)
    if arr.shape != tuple(shape):
        raise InvalidInputError(f"{name}: expected shape {tuple(shape)}, got {arr.shape}")
    grid[...] = arr
    return grid


@dataclass(frozen=True, eq=False)
class GridProblem:
    """Rectangular lattice problem.

    ``interior`` is a half-open box ``(n0, n1)`` in 1D or ``(n0, n1, m0, m1)`` in
    2D; every other lattice site belongs to the boundary set and carries a value
    of ``boundary_values``.  The default interior drops the outer frame.
    ``source`` must vanish outside the interior and ``boundary_values`` inside it.
    """

    shape: tuple
    weights: StencilWeights
    source: np.ndarray = None
    boundary_values: np.ndarray = None
    interior: tuple = None

    def __post_init__(self):
        shape = tuple(int(s) for s in np.atleast_1d(self.shape))
        if len(shape) not in (1, 2) or min(shape) < 1:
            raise InvalidInputError(f"lattice shape must be 1D or 2D with positive extents, got {shape}")
        if len(shape) == 1 and (self.weights.a_north or self.weights.a_south):
            raise InvalidInputError("1D lattice with nonzero north/south weights")
        object.__setattr__(self, "shape", shape)

        if self.interior is None:
            box = []
            for L in shape:
                box += [1, max(L - 1, 1)]
        else:
            box = [int(b) for b in self.interior]
        if len(box) != 2 * len(shape):
            raise InvalidInputError(f"interior box {tuple(box)} does not match lattice rank {len(shape)}")
        for axis, L in enumerate(shape):
            lo, hi = box[2 * axis], box[2 * axis + 1]
            if not 0 <= lo < hi <= L:
                raise InvalidInputError(f"interior box {tuple(box)} is empty or outside lattice {shape}")
        object.__setattr__(self, "interior", tuple(box))

        src = _as_grid(self.source, shape, "source")
        bnd = _as_grid(self.boundary_values, shape, "boundary_values")
        mask = self.interior_mask()
        if np.any(src[~mask] != 0.0):
            raise InvalidInputError("source is nonzero on a boundary site")
        if np.any(bnd[mask] != 0.0):
            raise InvalidInputError("boundary value given on an interior site")
        if not (np.all(np.isfinite(src)) and np.all(np.isfinite(bnd))):
            raise InvalidInputError("non-finite source or boundary value")
        for a in (src, bnd):
            a.setflags(write=False)
        object.__setattr__(self, "source", src)
        object.__setattr__(self, "boundary_values", bnd)

    @property
    def ndim(self):
        return len(self.shape)

    def interior_slices(self):
        b = self.interior
        return tuple(slice(b[2 * i], b[2 * i + 1]) for i in range(self.ndim))

    def interior_mask(self):
        mask = np.zeros(self.shape, dtype=bool)
        mask[self.interior_slices()] = True
        return mask


@dataclass(frozen=True, eq=False)
class LinearSystem:
    """Fixed-point system ``X = P X + B`` over the interior sites.

    ``push[i, d]`` is the interior index receiving fluid from ``i`` along
    direction ``d`` (or -1 when the weight is zero or the target is a boundary
    site); ``pull[i, d]`` is the interior index whose value enters row ``i``
    with weight ``weights[d]``.
    """

    dimension: int
    P: sp.csr_matrix
    B: np.ndarray
    site_index: np.ndarray
    push: np.ndarray
    pull: np.ndarray
    weights: np.ndarray
    shape: tuple = field(default=())

    def matvec(self, x):
        return self.P @ x

    def residual(self, x):
        """``B + P x - x``; zero exactly at the fixed point."""
        return self.B + self.P @ x - x


def _readonly(a):
    a = np.ascontiguousarray(a)
    a.setflags(write=False)
    return a


def assemble_system(problem: GridProblem) -> LinearSystem:
    """Build ``P`` and ``B`` with interior sites numbered in row-major order."""
    shape2 = problem.shape if problem.ndim == 2 else (problem.shape[0], 1)
    box = problem.interior if problem.ndim == 2 else problem.interior + (0, 1)
    n0, n1, m0, m1 = box
    w = problem.weights.as_array()
    src = problem.source.reshape(shape2)
    g = problem.boundary_values.reshape(shape2)

    nn, mm = np.meshgrid(np.arange(n0, n1), np.arange(m0, m1), indexing="ij")
    nn, mm = nn.ravel(), mm.ravel()
    dim = nn.size
    index_of = np.full(shape2, -1, dtype=np.int64)
    index_of[nn, mm] = np.arange(dim)

    B = src[nn, mm].copy()
    push = np.full((dim, 4), -1, dtype=np.int64)
    pull = np.full((dim, 4), -1, dtype=np.int64)
    rows, cols, vals = [], [], []
    for d, (dn, dm) in enumerate(DIRECTIONS):
        if w[d] == 0.0:
            continue
        for sign, table in ((1, push), (-1, pull)):
            tn, tm = nn + sign * dn, mm + sign * dm
            off = (tn < 0) | (tn >= shape2[0]) | (tm < 0) | (tm >= shape2[1])
            if np.any(off):
                k = int(np.argmax(off))
                site = (int(nn[k]), int(mm[k])) if problem.ndim == 2 else (int(nn[k]),)
                raise MalformedDomainError(
                    f"interior site {site} has a stencil neighbour outside the lattice"
                )
            target = index_of[tn, tm]
            table[:, d] = target
            if sign == -1:
                inner = target >= 0
                rows.append(np.nonzero(inner)[0])
                cols.append(target[inner])
                vals.append(np.full(inner.sum(), w[d]))
                B[~inner] += w[d] * g[tn[~inner], tm[~inner]]

    if rows:
        P = sp.coo_matrix(
            (np.concatenate(vals), (np.concatenate(rows), np.concatenate(cols))), shape=(dim, dim)
        ).tocsr()
    else:
        P = sp.csr_matrix((dim, dim))
    P.sort_indices()
    sites = np.stack([nn, mm], axis=1) if problem.ndim == 2 else nn[:, None]
    return LinearSystem(
        dimension=dim,
        P=P,
        B=_readonly(B),
        site_index=_readonly(sites),
        push=_readonly(push),
        pull=_readonly(pull),
        weights=_readonly(w),
        shape=problem.shape,
    )


def embed_solution(problem: GridProblem, system: LinearSystem, x) -> np.ndarray:
    """Full lattice field: ``x`` on the interior, boundary values elsewhere."""
    field_ = np.array(problem.boundary_values, dtype=float)
    field_[tuple(system.site_index.T)] = x
    return field_


def dd2d_residual(problem: GridProblem, U) -> np.ndarray:
    """Pointwise defect of the stencil relation at every interior site of ``U``."""
    U = np.asarray(U, dtype=float)
    U2 = U if problem.ndim == 2 else U[:, None]
    f2 = problem.source if problem.ndim == 2 else problem.source[:, None]
    box = problem.interior if problem.ndim == 2 else problem.interior + (0, 1)
    n0, n1, m0, m1 = box
    w = problem.weights.as_array()
    res = U2[n0:n1, m0:m1] - f2[n0:n1, m0:m1]
    for d, (dn, dm) in enumerate(DIRECTIONS):
        if w[d] != 0.0:
            # value at site - offset feeds the site along direction d
            res = res - w[d] * U2[n0 - dn : n1 - dn, m0 - dm : m1 - dm]
    return res if problem.ndim == 2 else res[:, 0]


def spectral_radius_estimate(system, iterations: int = 500) -> float:
    """Upper estimate of the spectral radius of ``|P|``.

    Power iteration runs on ``|P| + I`` (whose Perron root dominates strictly)
    and reports the Collatz-Wielandt bound ``max_i (A x)_i / x_i - 1``.  For a
    nonnegative matrix and positive iterate this bound never falls below the true
    radius and is nonincreasing in ``iterations``, so a value below 1 certifies
    contraction.
    """
    P = system.P if isinstance(system, LinearSystem) else sp.csr_matrix(system)
    A = abs(P).tocsr()
    n = A.shape[0]
    if n == 0 or A.nnz == 0:
        return 0.0
    x = np.ones(n)
    est = math.inf
    for _ in range(max(int(iterations), 1)):
        y = A @ x + x
        est = min(est, float(np.max(y / x)) - 1.0)
        x = y / y.max()
    return max(est, 0.0)
