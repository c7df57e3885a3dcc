# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled inner loops. Semantics must match ``_pykernels`` exactly."""

import numpy as np
cimport numpy as cnp
from libc.math cimport hypot, isinf, INFINITY

cnp.import_array()


cdef void _embed(const double complex[::1] z, double[:, ::1] out) noexcept nogil:
    # per point: (u_re, u_im, 1/s, hypot(1, |z|)/s) with s = max(1, |z|); infinity -> (1, 0, 0, 1)
    cdef Py_ssize_t k
    cdef double re, im, r, s
    for k in range(z.shape[0]):
        re = z[k].real
        im = z[k].imag
        if isinf(re) or isinf(im):
            out[k, 0] = 1.0
            out[k, 1] = 0.0
            out[k, 2] = 0.0
            out[k, 3] = 1.0
            continue
        r = hypot(re, im)
        if r <= 1.0:
            out[k, 0] = re
            out[k, 1] = im
            out[k, 2] = 1.0
            out[k, 3] = hypot(1.0, r)
        else:
            s = 1.0 / r
            out[k, 0] = re * s
            out[k, 1] = im * s
            out[k, 2] = s
            out[k, 3] = hypot(s, 1.0)


cdef inline double _dist(double[:, ::1] ea, Py_ssize_t i, double[:, ::1] eb, Py_ssize_t k) noexcept nogil:
    cdef double dx = ea[i, 0] * eb[k, 2] - eb[k, 0] * ea[i, 2]
    cdef double dy = ea[i, 1] * eb[k, 2] - eb[k, 1] * ea[i, 2]
    return 2.0 * hypot(dx, dy) / (ea[i, 3] * eb[k, 3])


def directed_hausdorff(const double complex[::1] a, const double complex[::1] b):
    """max over a of min over b of the chordal distance."""
    cdef Py_ssize_t na = a.shape[0], nb = b.shape[0], i, k
    cdef double[:, ::1] ea = np.empty((na, 4))
    cdef double[:, ::1] eb = np.empty((nb, 4))
    cdef double best = 0.0, cur, d
    _embed(a, ea)
    _embed(b, eb)
    with nogil:
        for i in range(na):
            cur = INFINITY
            for k in range(nb):
                d = _dist(ea, i, eb, k)
                if d < cur:
                    cur = d
                    if cur <= best:
                        break
            if cur > best:
                best = cur
    return best


def diameter(const double complex[::1] a):
    """Maximum pairwise chordal distance."""
    cdef Py_ssize_t n = a.shape[0], i, k
    cdef double[:, ::1] ea = np.empty((n, 4))
    cdef double best = 0.0, d
    _embed(a, ea)
    with nogil:
        for i in range(n):
            for k in range(i + 1, n):
                d = _dist(ea, i, ea, k)
                if d > best:
                    best = d
    return best


def chebval(const double complex[::1] c, const double[::1] x):
    """Clenshaw evaluation of a complex Chebyshev series at real points in [-1, 1].

    Four points share one pass over the coefficients so the independent
    recurrences overlap in the pipeline.
    """
    cdef Py_ssize_t n = c.shape[0], m = x.shape[0], i, k, q
    cdef const double[::1] cr = np.ascontiguousarray(np.real(np.asarray(c)))
    cdef const double[::1] ci = np.ascontiguousarray(np.imag(np.asarray(c)))
    cdef double[::1] out_r = np.empty(m)
    cdef double[::1] out_i = np.empty(m)
    cdef double x0, x1, x2, x3
    cdef double r0, r1, r2, r3, i0, i1, i2, i3
    cdef double s0, s1, s2, s3, j0, j1, j2, j3
    cdef double t
    if n == 0:
        return np.zeros(m, dtype=np.complex128)
    with nogil:
        i = 0
        while i + 4 <= m:
            x0 = 2.0 * x[i]
            x1 = 2.0 * x[i + 1]
            x2 = 2.0 * x[i + 2]
            x3 = 2.0 * x[i + 3]
            r0 = r1 = r2 = r3 = 0.0
            i0 = i1 = i2 = i3 = 0.0
            s0 = s1 = s2 = s3 = 0.0
            j0 = j1 = j2 = j3 = 0.0
            for k in range(n - 1, 0, -1):
                t = cr[k] + x0 * r0 - s0; s0 = r0; r0 = t
                t = ci[k] + x0 * i0 - j0; j0 = i0; i0 = t
                t = cr[k] + x1 * r1 - s1; s1 = r1; r1 = t
                t = ci[k] + x1 * i1 - j1; j1 = i1; i1 = t
                t = cr[k] + x2 * r2 - s2; s2 = r2; r2 = t
                t = ci[k] + x2 * i2 - j2; j2 = i2; i2 = t
                t = cr[k] + x3 * r3 - s3; s3 = r3; r3 = t
                t = ci[k] + x3 * i3 - j3; j3 = i3; i3 = t
            out_r[i] = cr[0] + 0.5 * x0 * r0 - s0
            out_i[i] = ci[0] + 0.5 * x0 * i0 - j0
            out_r[i + 1] = cr[0] + 0.5 * x1 * r1 - s1
            out_i[i + 1] = ci[0] + 0.5 * x1 * i1 - j1
            out_r[i + 2] = cr[0] + 0.5 * x2 * r2 - s2
            out_i[i + 2] = ci[0] + 0.5 * x2 * i2 - j2
            out_r[i + 3] = cr[0] + 0.5 * x3 * r3 - s3
            out_i[i + 3] = ci[0] + 0.5 * x3 * i3 - j3
            i += 4
        for q in range(i, m):
            x0 = 2.0 * x[q]
            r0 = i0 = s0 = j0 = 0.0
            for k in range(n - 1, 0, -1):
                t = cr[k] + x0 * r0 - s0; s0 = r0; r0 = t
                t = ci[k] + x0 * i0 - j0; j0 = i0; i0 = t
            out_r[q] = cr[0] + 0.5 * x0 * r0 - s0
            out_i[q] = ci[0] + 0.5 * x0 * i0 - j0
    return np.asarray(out_r) + 1j * np.asarray(out_i)
