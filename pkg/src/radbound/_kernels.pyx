# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled hot kernels: ball-slack evaluation and the smallest enclosing ball."""
import numpy as np
cimport numpy as cnp
from libc.math cimport sqrt, atan2, fabs, INFINITY
from libc.stdlib cimport malloc, free

cnp.import_array()

cdef double MB_REL = 1e-12


cdef inline double _slack_min_row(const double[:, ::1] P, Py_ssize_t i,
                                  const double[:, ::1] C, const double[::1] R,
                                  int kappa, Py_ssize_t exclude) nogil:
    cdef Py_ssize_t j, k
    cdef Py_ssize_t m = C.shape[0], D = C.shape[1]
    cdef double best = INFINITY, dm, dp, t, s
    for j in range(m):
        if j == exclude:
            continue
        dm = 0.0
        dp = 0.0
        if kappa == 0:
            for k in range(D):
                t = P[i, k] - C[j, k]
                dm += t * t
            s = R[j] - sqrt(dm)
        else:
            for k in range(D):
                t = P[i, k] - C[j, k]
                dm += t * t
                t = P[i, k] + C[j, k]
                dp += t * t
            s = R[j] - 2.0 * atan2(sqrt(dm), sqrt(dp))
        if s < best:
            best = s
    return best


def slack_min(points, centers, radii, int kappa, Py_ssize_t exclude=-1):
    cdef const double[:, ::1] P = np.ascontiguousarray(points, dtype=np.float64)
    cdef const double[:, ::1] C = np.ascontiguousarray(centers, dtype=np.float64)
    cdef const double[::1] R = np.ascontiguousarray(radii, dtype=np.float64)
    cdef Py_ssize_t n = P.shape[0], i
    out = np.empty(n, dtype=np.float64)
    cdef double[::1] o = out
    with nogil:
        for i in range(n):
            o[i] = _slack_min_row(P, i, C, R, kappa, exclude)
    return out


def count_inside(points, centers, radii, int kappa, Py_ssize_t exclude, double tol):
    cdef const double[:, ::1] P = np.ascontiguousarray(points, dtype=np.float64)
    cdef const double[:, ::1] C = np.ascontiguousarray(centers, dtype=np.float64)
    cdef const double[::1] R = np.ascontiguousarray(radii, dtype=np.float64)
    cdef Py_ssize_t n = P.shape[0], i, cnt = 0
    with nogil:
        for i in range(n):
            if _slack_min_row(P, i, C, R, kappa, exclude) >= -tol:
                cnt += 1
    return cnt


cdef struct MB:
    const double* P
    Py_ssize_t n
    Py_ssize_t d
    Py_ssize_t* L
    Py_ssize_t* sup
    double* c
    double r2
    double* work


cdef void _circumball(MB* mb, Py_ssize_t ns) nogil:
    """Ball with support points on its boundary, centered in their affine hull."""
    cdef Py_ssize_t d = mb.d, k = ns - 1, a, b, q, piv
    cdef const double* b0 = mb.P + mb.sup[0] * d
    cdef const double* pa
    cdef const double* pb
    cdef double* M = mb.work            # k x (k+1) augmented system
    cdef double* lam = mb.work + k * (k + 1)
    cdef double s, t, best
    if ns == 0:
        mb.r2 = -1.0
        return
    if k == 0:
        for q in range(d):
            mb.c[q] = b0[q]
        mb.r2 = 0.0
        return
    for a in range(k):
        pa = mb.P + mb.sup[a + 1] * d
        for b in range(k):
            pb = mb.P + mb.sup[b + 1] * d
            s = 0.0
            for q in range(d):
                s += (pa[q] - b0[q]) * (pb[q] - b0[q])
            M[a * (k + 1) + b] = 2.0 * s
        s = 0.0
        for q in range(d):
            s += (pa[q] - b0[q]) * (pa[q] - b0[q])
        M[a * (k + 1) + k] = s
    # Gaussian elimination with partial pivoting; near-singular pivots drop out
    for a in range(k):
        piv = a
        best = fabs(M[a * (k + 1) + a])
        for b in range(a + 1, k):
            if fabs(M[b * (k + 1) + a]) > best:
                best = fabs(M[b * (k + 1) + a])
                piv = b
        if piv != a:
            for q in range(k + 1):
                t = M[a * (k + 1) + q]
                M[a * (k + 1) + q] = M[piv * (k + 1) + q]
                M[piv * (k + 1) + q] = t
        if best < 1e-300:
            continue
        for b in range(a + 1, k):
            t = M[b * (k + 1) + a] / M[a * (k + 1) + a]
            for q in range(a, k + 1):
                M[b * (k + 1) + q] -= t * M[a * (k + 1) + q]
    for a in range(k - 1, -1, -1):
        s = M[a * (k + 1) + k]
        for b in range(a + 1, k):
            s -= M[a * (k + 1) + b] * lam[b]
        t = M[a * (k + 1) + a]
        lam[a] = s / t if fabs(t) > 1e-300 else 0.0
    for q in range(d):
        s = b0[q]
        for a in range(k):
            pa = mb.P + mb.sup[a + 1] * d
            s += lam[a] * (pa[q] - b0[q])
        mb.c[q] = s
    s = 0.0
    for q in range(d):
        t = mb.c[q] - b0[q]
        s += t * t
    mb.r2 = s


cdef void _mtf(MB* mb, Py_ssize_t end, Py_ssize_t ns) nogil:
    cdef Py_ssize_t i, j, q, p
    cdef double s, t
    cdef const double* x
    _circumball(mb, ns)
    if ns == mb.d + 1:
        return
    i = 0
    while i < end:
        p = mb.L[i]
        x = mb.P + p * mb.d
        if mb.r2 >= 0.0:
            s = 0.0
            for q in range(mb.d):
                t = x[q] - mb.c[q]
                s += t * t
            if s <= mb.r2 * (1.0 + MB_REL):
                i += 1
                continue
        mb.sup[ns] = p
        _mtf(mb, i, ns + 1)
        for j in range(i, 0, -1):
            mb.L[j] = mb.L[j - 1]
        mb.L[0] = p
        i += 1


def miniball(points):
    cdef const double[:, ::1] P = np.ascontiguousarray(points, dtype=np.float64)
    cdef Py_ssize_t n = P.shape[0], d = P.shape[1], i
    if n == 0:
        raise ValueError("miniball of an empty point set")
    cdef MB mb
    mb.P = &P[0, 0]
    mb.n = n
    mb.d = d
    mb.L = <Py_ssize_t*> malloc(n * sizeof(Py_ssize_t))
    mb.sup = <Py_ssize_t*> malloc((d + 1) * sizeof(Py_ssize_t))
    mb.c = <double*> malloc(d * sizeof(double))
    mb.work = <double*> malloc((d + 1) * (d + 3) * sizeof(double))
    if mb.L == NULL or mb.sup == NULL or mb.c == NULL or mb.work == NULL:
        free(mb.L); free(mb.sup); free(mb.c); free(mb.work)
        raise MemoryError()
    try:
        for i in range(n):
            mb.L[i] = i
        with nogil:
            _mtf(&mb, n, 0)
        center = np.array([mb.c[i] for i in range(d)])
        return center, mb.r2
    finally:
        free(mb.L); free(mb.sup); free(mb.c); free(mb.work)
