"""Pure-Python inner loops, used when the compiled extension is unavailable.

Arrays are copied to lists for the duration of a call and written back; element
access on lists is several times cheaper than on numpy arrays.
"""

FLUSH = 1e-300


def _push_lists(push, w):
    return push.tolist(), [float(x) for x in w]


def _diffuse(H, F, push, w, i):
    q = F[i]
    F[i] = 0.0
    if q == 0.0:
        return
    H[i] += q
    for d, v in enumerate(push[i]):
        if v >= 0:
            fv = F[v] + w[d] * q
            # NaN must survive so that the caller can detect it
            F[v] = 0.0 if abs(fv) < FLUSH else fv


def diffuse_sequence(H, F, push, w, sites):
    h, f = H.tolist(), F.tolist()
    pl, wl = _push_lists(push, w)
    for i in sites.tolist():
        _diffuse(h, f, pl, wl, i)
    H[:] = h
    F[:] = f


def sweep_chunk(H, F, push, w, start, nops):
    h, f = H.tolist(), F.tolist()
    pl, wl = _push_lists(push, w)
    n = len(h)
    i = int(start)
    for _ in range(int(nops)):
        _diffuse(h, f, pl, wl, i)
        i += 1
        if i == n:
            i = 0
    H[:] = h
    F[:] = f
    return i


def _before(F, a, b):
    fa, fb = abs(F[a]), abs(F[b])
    return fa > fb or (fa == fb and a < b)


def _swap(heap, pos, p, q):
    a, b = heap[p], heap[q]
    heap[p], heap[q] = b, a
    pos[b], pos[a] = p, q


def _sift_up(F, heap, pos, p):
    while p > 0:
        parent = (p - 1) >> 1
        if _before(F, heap[p], heap[parent]):
            _swap(heap, pos, p, parent)
            p = parent
        else:
            break


def _sift_down(F, heap, pos, p):
    n = len(heap)
    while True:
        best = p
        c = 2 * p + 1
        if c < n and _before(F, heap[c], heap[best]):
            best = c
        c += 1
        if c < n and _before(F, heap[c], heap[best]):
            best = c
        if best == p:
            return
        _swap(heap, pos, p, best)
        p = best


def heap_build(F, heap, pos):
    f = F.tolist()
    n = len(f)
    hl, pl = list(range(n)), list(range(n))
    for i in range(n // 2 - 1, -1, -1):
        _sift_down(f, hl, pl, i)
    heap[:] = hl
    pos[:] = pl


def greedy_chunk(H, F, push, w, heap, pos, nops):
    h, f = H.tolist(), F.tolist()
    hl, ps = heap.tolist(), pos.tolist()
    pl, wl = _push_lists(push, w)
    done = 0
    for _ in range(int(nops)):
        i = hl[0]
        if f[i] == 0.0:
            break
        _diffuse(h, f, pl, wl, i)
        _sift_down(f, hl, ps, ps[i])
        for v in pl[i]:
            if v >= 0:
                _sift_up(f, hl, ps, ps[v])
                _sift_down(f, hl, ps, ps[v])
        done += 1
    H[:] = h
    F[:] = f
    heap[:] = hl
    pos[:] = ps
    return done


def gs_sweep(X, B, pull, w):
    x, b = X.tolist(), B.tolist()
    pl, wl = _push_lists(pull, w)
    maxupd = 0.0
    for i in range(len(x)):
        s = b[i]
        for d, u in enumerate(pl[i]):
            if u >= 0:
                s += wl[d] * x[u]
        upd = abs(s - x[i])
        if upd > maxupd:
            maxupd = upd
        x[i] = s
    X[:] = x
    return maxupd


def jacobi_sweep(X, Xnew, B, pull, w):
    x, b = X.tolist(), B.tolist()
    pl, wl = _push_lists(pull, w)
    xn = [0.0] * len(x)
    maxupd = 0.0
    for i in range(len(x)):
        s = b[i]
        for d, u in enumerate(pl[i]):
            if u >= 0:
                s += wl[d] * x[u]
        upd = abs(s - x[i])
        if upd > maxupd:
            maxupd = upd
        xn[i] = s
    Xnew[:] = xn
    return maxupd


def geom_forward(f, r, out):
    acc = 0.0
    vals = []
    for v in f.tolist():
        acc = r * acc + v
        vals.append(acc)
    out[:] = vals
