"""Reference computations that share no code with the package solvers."""

import numpy as np


def brute_force_catalyst(a_plus, a_minus, N, tol=1e-13, max_iter=10_000_000):
    """Literal diffusion on sites -N..N.

    The origin diffuses its unit of fluid once and then absorbs; sites +-N
    absorb.  All other sites diffuse synchronously until the fluid left on them
    is at most ``tol``.  Returns ``(H, absorbed_from_plus, absorbed_from_minus)``
    with ``H`` indexed by ``n + N``.
    """
    size = 2 * N + 1
    o = N
    H = np.zeros(size)
    F = np.zeros(size)
    H[o] = 1.0
    F[o + 1] += a_plus
    F[o - 1] += a_minus
    active = np.ones(size, dtype=bool)
    active[[0, o, size - 1]] = False
    from_plus = from_minus = 0.0
    for _ in range(max_iter):
        q = np.where(active, F, 0.0)
        if np.abs(q).sum() <= tol:
            break
        H += q
        F[active] = 0.0
        F[1:] += a_plus * q[:-1]
        F[:-1] += a_minus * q[1:]
        # fluid that lands on the origin stays there
        from_plus += a_minus * q[o + 1]
        from_minus += a_plus * q[o - 1]
        F[o] = 0.0
        F[0] = F[-1] = 0.0
    else:
        raise RuntimeError("brute force did not converge")
    return H, from_plus, from_minus


def brute_force_free_origin(a_plus, a_minus, N, tol=1e-14):
    """Same as above but the origin keeps diffusing; returns H at the origin."""
    size = 2 * N + 1
    H = np.zeros(size)
    F = np.zeros(size)
    F[N] = 1.0
    active = np.ones(size, dtype=bool)
    active[[0, size - 1]] = False
    while True:
        q = np.where(active, F, 0.0)
        if np.abs(q).sum() <= tol:
            return H[N]
        H += q
        F[active] = 0.0
        F[1:] += a_plus * q[:-1]
        F[:-1] += a_minus * q[1:]
        F[0] = F[-1] = 0.0


def dense_fixed_point(P, B):
    P = np.asarray(P.todense() if hasattr(P, "todense") else P, dtype=float)
    return np.linalg.solve(np.eye(P.shape[0]) - P, np.asarray(B, dtype=float))


def dense_row_solve(f, a_plus, a_minus):
    """H[x] = a_minus H[x+1] + a_plus H[x-1] + f[x], H[0] = H[L] = 0, by dense LU."""
    f = np.asarray(f, dtype=float)
    m = f.size - 2
    A = np.eye(m) - a_minus * np.eye(m, k=1) - a_plus * np.eye(m, k=-1)
    H = np.zeros(f.size)
    H[1:-1] = np.linalg.solve(A, f[1:-1])
    return H
