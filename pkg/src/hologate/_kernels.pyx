# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled kernel for the path-ordered product of 4x4 matrix exponentials.

Each increment is exponentiated by scaling-and-squaring with an order-12
Taylor polynomial (scaled norm <= 1/4 gives errors far below double
rounding), then composed in path order with later factors on the left.
"""

import numpy as np

COMPILED = True

cdef double _abs1(double complex z) noexcept nogil:
    return abs(z.real) + abs(z.imag)


cdef void _matmul4(const double complex* a, const double complex* b,
                   double complex* out) noexcept nogil:
    cdef int i, j, k
    cdef double complex acc
    for i in range(4):
        for j in range(4):
            acc = 0
            for k in range(4):
                acc = acc + a[4 * i + k] * b[4 * k + j]
            out[4 * i + j] = acc


cdef void _expm4(const double complex* m, double complex* out) noexcept nogil:
    cdef double complex scaled[16]
    cdef double complex term[16]
    cdef double complex tmp[16]
    cdef double norm, rowsum
    cdef double scale
    cdef int i, j, k, nsq

    norm = 0
    for i in range(4):
        rowsum = 0
        for j in range(4):
            rowsum += _abs1(m[4 * i + j])
        if rowsum > norm:
            norm = rowsum

    nsq = 0
    scale = 1.0
    while norm * scale > 0.25 and nsq < 40:
        scale *= 0.5
        nsq += 1

    for i in range(16):
        scaled[i] = m[i] * scale
        term[i] = scaled[i]
        out[i] = scaled[i]
    for i in range(4):
        out[5 * i] = out[5 * i] + 1.0

    for k in range(2, 13):
        _matmul4(term, scaled, tmp)
        for i in range(16):
            term[i] = tmp[i] / k
            out[i] = out[i] + term[i]

    for k in range(nsq):
        _matmul4(out, out, tmp)
        for i in range(16):
            out[i] = tmp[i]


def ordered_expm_product(increments):
    """exp(M[N-1]) @ ... @ exp(M[0]) for a stack of (N, 4, 4) increments."""
    arr = np.ascontiguousarray(increments, dtype=np.complex128)
    if arr.ndim != 3 or arr.shape[1] != 4 or arr.shape[2] != 4:
        raise ValueError(f"expected (N, 4, 4) increments, got {arr.shape}")
    out = np.eye(4, dtype=np.complex128)
    cdef double complex[:, :, ::1] mv = arr
    cdef double complex[:, ::1] gv = out
    cdef double complex factor[16]
    cdef double complex acc[16]
    cdef double complex tmp[16]
    cdef Py_ssize_t n = mv.shape[0], k
    cdef int i
    with nogil:
        for i in range(16):
            acc[i] = 0
        for i in range(4):
            acc[5 * i] = 1
        for k in range(n):
            _expm4(&mv[k, 0, 0], factor)
            _matmul4(factor, acc, tmp)
            for i in range(16):
                acc[i] = tmp[i]
        for i in range(16):
            gv[i // 4, i % 4] = acc[i]
    return out
