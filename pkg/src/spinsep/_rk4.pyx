# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled RK4 loop for i dC/dt = H C with H in CSR form.

Complex arrays are passed as interleaved float64 views (re, im, re, im, ...).
"""
from libc.string cimport memcpy
import numpy as np


cdef inline void _deriv(const double* data, const int* indices, const int* indptr,
                        const double* x, double* k, Py_ssize_t dim) noexcept nogil:
    # k = -i H x
    cdef Py_ssize_t r, p, c
    cdef double yr, yi, hr, hi, xr, xi
    for r in range(dim):
        yr = 0.0
        yi = 0.0
        for p in range(indptr[r], indptr[r + 1]):
            c = indices[p]
            hr = data[2 * p]
            hi = data[2 * p + 1]
            xr = x[2 * c]
            xi = x[2 * c + 1]
            yr += hr * xr - hi * xi
            yi += hr * xi + hi * xr
        k[2 * r] = yi
        k[2 * r + 1] = -yr


cdef inline void _axpy(const double* x, double a, const double* k, double* out,
                       Py_ssize_t n2) noexcept nogil:
    cdef Py_ssize_t q
    for q in range(n2):
        out[q] = x[q] + a * k[q]


def propagate(const double[::1] data, const int[::1] indices, const int[::1] indptr,
              double[::1] psi, double dt, Py_ssize_t n_steps, Py_ssize_t stride,
              Py_ssize_t offset, bint include_last, double[:, ::1] out):
    """Advance ``psi`` in place by ``n_steps`` RK4 steps of size ``dt``.

    Step ``j`` (0 <= j <= n_steps, the last one only if ``include_last``) is
    copied into the next row of ``out`` when ``(j + offset) % stride == 0``.
    Returns the number of rows written. The GIL is released while stepping.
    """
    cdef Py_ssize_t dim = indptr.shape[0] - 1
    cdef Py_ssize_t n2 = 2 * dim
    if psi.shape[0] != n2:
        raise ValueError("state length does not match operator dimension")
    if out.shape[0] > 0 and out.shape[1] != n2:
        raise ValueError("record buffer has the wrong width")
    work = np.empty((5, n2 if n2 > 0 else 1), dtype=np.float64)
    cdef double[:, ::1] w = work
    cdef double* k1 = &w[0, 0]
    cdef double* k2 = &w[1, 0]
    cdef double* k3 = &w[2, 0]
    cdef double* k4 = &w[3, 0]
    cdef double* tmp = &w[4, 0]
    cdef double* c = &psi[0]
    cdef const double* hd = &data[0] if data.shape[0] > 0 else NULL
    cdef const int* hi = &indices[0] if indices.shape[0] > 0 else NULL
    cdef const int* hp = &indptr[0]
    cdef Py_ssize_t max_rec = out.shape[0]
    cdef Py_ssize_t n_rec = 0
    cdef Py_ssize_t j, q
    cdef double h6 = dt / 6.0
    cdef double half = 0.5 * dt
    with nogil:
        for j in range(n_steps + 1):
            if j == n_steps and not include_last:
                break
            if (j + offset) % stride == 0:
                if n_rec >= max_rec:
                    break
                memcpy(&out[n_rec, 0], c, n2 * sizeof(double))
                n_rec += 1
            if j == n_steps:
                break
            _deriv(hd, hi, hp, c, k1, dim)
            _axpy(c, half, k1, tmp, n2)
            _deriv(hd, hi, hp, tmp, k2, dim)
            _axpy(c, half, k2, tmp, n2)
            _deriv(hd, hi, hp, tmp, k3, dim)
            _axpy(c, dt, k3, tmp, n2)
            _deriv(hd, hi, hp, tmp, k4, dim)
            for q in range(n2):
                c[q] = c[q] + h6 * (k1[q] + 2.0 * k2[q] + 2.0 * k3[q] + k4[q])
    return n_rec
