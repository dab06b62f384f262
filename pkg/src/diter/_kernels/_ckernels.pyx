# cython: boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled inner loops.  Signatures mirror ``_pykernels`` exactly."""

from libc.math cimport fabs

ctypedef long long index_t

cdef double FLUSH = 1e-300


cdef inline void _diffuse(double[::1] H, double[::1] F, const index_t[:, ::1] push,
                          const double[::1] w, index_t i) noexcept nogil:
    cdef double q = F[i]
    cdef index_t v
    cdef int d
    F[i] = 0.0
    if q == 0.0:
        return
    H[i] += q
    for d in range(4):
        v = push[i, d]
        if v >= 0:
            F[v] += w[d] * q
            if fabs(F[v]) < FLUSH:
                F[v] = 0.0


def diffuse_sequence(double[::1] H, double[::1] F, const index_t[:, ::1] push,
                     const double[::1] w, const index_t[::1] sites):
    cdef Py_ssize_t k
    with nogil:
        for k in range(sites.shape[0]):
            _diffuse(H, F, push, w, sites[k])


def sweep_chunk(double[::1] H, double[::1] F, const index_t[:, ::1] push,
                const double[::1] w, index_t start, index_t nops):
    """Diffuse ``nops`` sites cyclically from ``start``; return the next site."""
    cdef index_t n = H.shape[0]
    cdef index_t i = start
    cdef index_t k
    with nogil:
        for k in range(nops):
            _diffuse(H, F, push, w, i)
            i += 1
            if i == n:
                i = 0
    return i


# ---- indexed max-heap on |F|, ties to the lower site index ----

cdef inline bint _before(const double[::1] F, index_t a, index_t b) noexcept nogil:
    cdef double fa = fabs(F[a])
    cdef double fb = fabs(F[b])
    return fa > fb or (fa == fb and a < b)


cdef inline void _swap(index_t[::1] heap, index_t[::1] pos, index_t p, index_t q) noexcept nogil:
    cdef index_t a = heap[p]
    cdef index_t b = heap[q]
    heap[p] = b
    heap[q] = a
    pos[b] = p
    pos[a] = q


cdef void _sift_up(const double[::1] F, index_t[::1] heap, index_t[::1] pos, index_t p) noexcept nogil:
    cdef index_t parent
    while p > 0:
        parent = (p - 1) >> 1
        if _before(F, heap[p], heap[parent]):
            _swap(heap, pos, p, parent)
            p = parent
        else:
            break


cdef void _sift_down(const double[::1] F, index_t[::1] heap, index_t[::1] pos, index_t p) noexcept nogil:
    cdef index_t n = heap.shape[0]
    cdef index_t c, best
    while True:
        best = p
        c = 2 * p + 1
        if c < n and _before(F, heap[c], heap[best]):
            best = c
        c += 1
        if c < n and _before(F, heap[c], heap[best]):
            best = c
        if best == p:
            break
        _swap(heap, pos, p, best)
        p = best


def heap_build(const double[::1] F, index_t[::1] heap, index_t[::1] pos):
    cdef index_t n = F.shape[0]
    cdef index_t i
    with nogil:
        for i in range(n):
            heap[i] = i
            pos[i] = i
        i = n // 2
        while i > 0:
            i -= 1
            _sift_down(F, heap, pos, i)


def greedy_chunk(double[::1] H, double[::1] F, const index_t[:, ::1] push,
                 const double[::1] w, index_t[::1] heap, index_t[::1] pos, index_t nops):
    """Diffuse the largest-fluid site up to ``nops`` times; stop early once all fluid is 0."""
    cdef index_t k, i, v
    cdef int d
    cdef index_t done = 0
    with nogil:
        for k in range(nops):
            i = heap[0]
            if F[i] == 0.0:
                break
            _diffuse(H, F, push, w, i)
            _sift_down(F, heap, pos, pos[i])
            for d in range(4):
                v = push[i, d]
                if v >= 0:
                    _sift_up(F, heap, pos, pos[v])
                    _sift_down(F, heap, pos, pos[v])
            done += 1
    return done


# ---- row-based baselines ----

def gs_sweep(double[::1] X, const double[::1] B, const index_t[:, ::1] pull,
             const double[::1] w):
    cdef index_t n = X.shape[0]
    cdef index_t i, u
    cdef int d
    cdef double s, upd
    cdef double maxupd = 0.0
    with nogil:
        for i in range(n):
            s = B[i]
            for d in range(4):
                u = pull[i, d]
                if u >= 0:
                    s += w[d] * X[u]
            upd = fabs(s - X[i])
            if upd > maxupd:
                maxupd = upd
            X[i] = s
    return maxupd


def jacobi_sweep(const double[::1] X, double[::1] Xnew, const double[::1] B,
                 const index_t[:, ::1] pull, const double[::1] w):
    cdef index_t n = X.shape[0]
    cdef index_t i, u
    cdef int d
    cdef double s, upd
    cdef double maxupd = 0.0
    with nogil:
        for i in range(n):
            s = B[i]
            for d in range(4):
                u = pull[i, d]
                if u >= 0:
                    s += w[d] * X[u]
            upd = fabs(s - X[i])
            if upd > maxupd:
                maxupd = upd
            Xnew[i] = s
    return maxupd


def geom_forward(const double[::1] f, double r, double[::1] out):
    """out[i] = r * out[i-1] + f[i]"""
    cdef Py_ssize_t i, n = f.shape[0]
    cdef double acc = 0.0
    with nogil:
        for i in range(n):
            acc = r * acc + f[i]
            out[i] = acc
