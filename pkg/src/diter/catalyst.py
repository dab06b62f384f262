"""Closed-form elementary diffusion limits on a 1D lattice.

For the 1D diffusion ``F(n+1) += a_plus F(n)``, ``F(n-1) += a_minus F(n)``, a
unit of fluid diffused once from the origin, with the origin absorbing
everything that later returns, leaves the history

    phi(n)  = r_plus ** n        (n >= 0)
    phi(-n) = r_minus ** n

where ``r_plus`` is the small root of ``a_minus x**2 - x + a_plus = 0`` and
``r_minus`` the small root of the mirrored quadratic.  With a zero-valued site
at distance ``N`` the profile becomes
``r**n (1 - rho**(N-n)) / (1 - rho**N)`` with ``rho = r_plus * r_minus``.
Dividing by ``1 - a_minus phi(1) - a_plus phi(-1)`` accounts for fluid that
returns to a non-absorbing origin.

:func:`apply_profile_row` uses these profiles to produce the exact limit of
diffusing a whole row of fluid between two zero-valued end sites in O(L).
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import _kernels
from .errors import ComplexRootsError, DomainError, NumericalFailureError, UnstableProfileError

__all__ = [
    "CatalystProfile",
    "apply_profile_row",
    "compensation_series",
    "compute_roots",
    "dump_profile_csv",
    "make_profile",
    "normalize",
    "phi_bounded",
    "phi_tilde",
    "phi_unbounded",
]

MARGINAL_TOL = 1e-12


def compute_roots(a_plus, a_minus):
    """Small roots of ``a_minus x^2 - x + a_plus`` and its mirror.

    Evaluated as ``2 a / (1 + sqrt(1 - 4 a_plus a_minus))``, which equals the
    textbook form, has no cancellation for small products and reduces to
    ``r_plus = a_plus`` when ``a_minus = 0`` (and symmetrically).
    """
    a_plus, a_minus = float(a_plus), float(a_minus)
    disc = 1.0 - 4.0 * a_plus * a_minus
    if disc < 0.0:
        if disc > -MARGINAL_TOL:
            disc = 0.0
        else:
            raise ComplexRootsError(
                f"4 a_plus a_minus = {4 * a_plus * a_minus:.6g} > 1: no real catalyst roots"
            )
    s = 1.0 + math.sqrt(disc)
    return 2.0 * a_plus / s, 2.0 * a_minus / s


@dataclass
class CatalystProfile:
    a_plus: float
    a_minus: float
    r_plus: float = field(init=False)
    r_minus: float = field(init=False)
    bound: int | None = None
    norm: float | None = None

    def __post_init__(self):
        self.r_plus, self.r_minus = compute_roots(self.a_plus, self.a_minus)

    @property
    def rho(self):
        return self.r_plus * self.r_minus

    @property
    def marginal(self):
        return abs(self.rho - 1.0) <= MARGINAL_TOL


def make_profile(a_plus, a_minus, bound=None):
    prof = CatalystProfile(float(a_plus), float(a_minus), bound=bound)
    if bound is not None and bound < 1:
        raise DomainError("bound must be at least 1")
    return prof


def phi_unbounded(profile: CatalystProfile, n: int) -> float:
    if n >= 0:
        return profile.r_plus ** n
    return profile.r_minus ** (-n)


def _one_minus_pow(rho, m):
    """``1 - rho**m``, accurate for rho close to 1."""
    if rho > 0.0:
        return -math.expm1(m * math.log(rho))
    return 1.0 - rho ** m


def phi_bounded(profile: CatalystProfile, N: int, n: int) -> float:
    """Profile with zero-valued sites at ``+N`` and ``-N`` and an absorbing origin."""
    N, n = int(N), int(n)
    if abs(n) > N:
        raise DomainError(f"|n| = {abs(n)} exceeds the bound N = {N}")
    m = abs(n)
    r = profile.r_plus if n >= 0 else profile.r_minus
    if m == N:
        return 0.0
    if profile.marginal:
        return r ** m * (N - m) / N
    return r ** m * _one_minus_pow(profile.rho, N - m) / _one_minus_pow(profile.rho, N)


def normalize(profile: CatalystProfile, N: int | None = None) -> float:
    """Denominator ``1 - a_minus phi(1) - a_plus phi(-1)``, cached on the profile.

    On the unbounded line this equals ``sqrt(1 - 4 a_plus a_minus)``.
    """
    if N is None:
        phi_p, phi_m = profile.r_plus, profile.r_minus
    else:
        phi_p, phi_m = phi_bounded(profile, N, 1), phi_bounded(profile, N, -1)
    den = 1.0 - profile.a_minus * phi_p - profile.a_plus * phi_m
    if not den > MARGINAL_TOL:
        raise UnstableProfileError(f"normalisation denominator {den:.3g} is not positive")
    profile.norm = den
    profile.bound = N
    return den


def phi_tilde(profile: CatalystProfile, n: int, N: int | None = None) -> float:
    norm = normalize(profile, N)
    phi = phi_unbounded(profile, n) if N is None else phi_bounded(profile, N, n)
    return phi / norm


def compensation_series(profile: CatalystProfile, N: int, n: int, terms: int) -> float:
    """Partial sums of the alternating boundary-compensation series for ``phi_+^N(n)``.

    ``terms`` counts pairs of compensations; the partial sum approaches
    :func:`phi_bounded` geometrically with ratio ``rho**N``.
    """
    if not 0 <= n <= N:
        raise DomainError(f"n = {n} outside [0, {N}]")
    rp, rm = profile.r_plus, profile.r_minus
    total = rp ** n
    for j in range(1, terms + 1):
        # rho**(jN) r_plus**n - rho**(jN) r_minus**(-n), written without negative powers
        total += (rp * rm) ** (j * N) * rp ** n - rp ** (j * N) * rm ** (j * N - n)
    return total


def dump_profile_csv(path, profile: CatalystProfile, N: int):
    """Write ``n,phi,phi_bounded,phi_tilde`` for ``n`` in ``[-N, N]``."""
    rows = []
    try:
        norm = normalize(profile)
    except UnstableProfileError:
        norm = math.nan
    for n in range(-N, N + 1):
        phi = phi_unbounded(profile, n)
        rows.append((n, phi, phi_bounded(profile, N, n), phi / norm))
    with Path(path).open("w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(("n", "phi", "phi_bounded", "phi_tilde"))
        for n, a, b, c in rows:
            w.writerow((n, repr(a), repr(b), repr(c)))
    return rows


# ---------------------------------------------------------------------------
# whole-row distribution

def _geom_forward(f, r):
    out = np.empty_like(f)
    _kernels.geom_forward(np.ascontiguousarray(f), float(r), out)
    return out


def _geom_backward(f, r):
    """``out[x] = sum_{y > x} f[y] r**(y - x)``"""
    rev = np.ascontiguousarray(f[::-1])
    acc = _geom_forward(rev, r)[::-1]
    out = np.zeros_like(f)
    out[:-1] = r * acc[1:]
    return out


def _powers(r, m):
    """``r**k`` for k = 0..m without overflow warnings at r = 0."""
    k = np.arange(m + 1, dtype=float)
    if r == 0.0:
        return (k == 0).astype(float)
    return np.power(r, k)


def _free_line(f, profile):
    """Superposition of the normalised unbounded profile centred at every source."""
    norm = math.sqrt(max(1.0 - 4.0 * profile.a_plus * profile.a_minus, 0.0))
    if not norm > MARGINAL_TOL:
        raise UnstableProfileError("unbounded profile cannot be normalised (4 a_plus a_minus = 1)")
    return (_geom_forward(f, profile.r_plus) + _geom_backward(f, profile.r_minus)) / norm


def _row_closed(f, profile):
    L = f.size - 1
    u = _free_line(f, profile)
    u0, uL = u[0], u[L]
    rp, rm = profile.r_plus, profile.r_minus
    pp, pm = _powers(rp, L), _powers(rm, L)
    det = _one_minus_pow(profile.rho, L)
    # homogeneous correction A rp**x + C rm**(L-x) restoring zero end values
    A = (u0 - uL * pm[L]) / det
    C = (uL - u0 * pp[L]) / det
    return u - A * pp - C * pm[::-1]


def _row_iterative(f, profile, tolerance):
    L = f.size - 1
    u = _free_line(f, profile)
    pp, pm = _powers(profile.r_plus, L), _powers(profile.r_minus, L)
    scale = max(float(np.abs(f).sum()), np.finfo(float).tiny)
    rounds = 0
    while abs(u[0]) + abs(u[L]) > tolerance * scale:
        if profile.rho >= 1.0 - MARGINAL_TOL or rounds > 100_000:
            raise NumericalFailureError("boundary compensation does not contract")
        u = u - u[0] * pp
        u = u - u[L] * pm[::-1]
        rounds += 1
    return u


def _row_bounded(f, profile):
    """Two-sided bounded profile per source, superposed with running sums.

    A source at ``x`` sees zero sites at distances ``x`` and ``L - x``; its
    history is ``c_x phi_+^{L-x}(y - x)`` to the right and
    ``c_x phi_-^{x}(x - y)`` to the left, with ``c_x`` the return normalisation.
    Valid on the marginal branch too, where ``1 - rho**m`` becomes ``m``.
    """
    L = f.size - 1
    rp, rm = profile.r_plus, profile.r_minus
    m = np.arange(L + 1, dtype=float)
    if profile.marginal:
        q = m
    elif profile.rho > 0.0:
        q = -np.expm1(m * math.log(profile.rho))
    else:
        q = 1.0 - np.power(profile.rho, m)
    x = np.arange(1, L)
    # phi_+^{L-x}(1) and phi_-^{x}(1)
    right1 = rp * q[L - x - 1] / q[L - x]
    left1 = rm * q[x - 1] / q[x]
    c = 1.0 / (1.0 - profile.a_minus * right1 - profile.a_plus * left1)
    wr = np.zeros(L + 1)
    wl = np.zeros(L + 1)
    wr[1:L] = f[1:L] * c / q[L - x]
    wl[1:L] = f[1:L] * c / q[x]
    right = _geom_forward(wr, rp) * q[::-1]
    left = _geom_backward(wl, rm) * q
    return right + left


def apply_profile_row(fluid_row, profile: CatalystProfile, tolerance: float = 1e-12,
                      method: str = "auto") -> np.ndarray:
    """Exact limit of diffusing ``fluid_row`` on sites ``0..L`` with zero ends.

    Returns ``H`` with ``H[0] = H[L] = 0`` and
    ``H[x] = a_minus H[x+1] + a_plus H[x-1] + f[x]`` on the interior.

    ``method``:
      - ``"closed"``: unbounded normalised profile, then the two boundary
        surpluses are cancelled by the analytically summed reflection series;
      - ``"iterative"``: same start, reflections applied one at a time until the
        uncompensated end mass is at most ``tolerance * sum |f|``;
      - ``"bounded"``: per-source two-sided bounded profiles (no compensation);
      - ``"auto"``: ``closed`` unless the profile is marginal, then ``bounded``.
    """
    f = np.array(fluid_row, dtype=float)
    if f.ndim != 1 or f.size < 2:
        raise ValueError("fluid row needs at least the two end sites")
    if not np.all(np.isfinite(f)):
        raise NumericalFailureError("non-finite fluid in row")
    if f[0] != 0.0 or f[-1] != 0.0:
        raise ValueError("end sites of the row are zero-valued boundaries and carry no fluid")
    if f.size == 2:
        return np.zeros(2)
    if method == "auto":
        method = "bounded" if profile.marginal else "closed"
    if method == "closed":
        H = _row_closed(f, profile)
    elif method == "iterative":
        H = _row_iterative(f, profile, tolerance)
    elif method == "bounded":
        H = _row_bounded(f, profile)
    else:
        raise ValueError(f"unknown method {method!r}")
    if not np.all(np.isfinite(H)):
        raise NumericalFailureError("non-finite history produced by row distribution")
    H[0] = H[-1] = 0.0
    return H
