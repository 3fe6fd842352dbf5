# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled RK4 kernel for the bump-times-quadratic Hamiltonian field.

Mirrors _core_py.rk4_quad_bump; the per-point inner loop runs in C with no
Python calls per stage.  Points at or outside the support radius see an
exactly zero field.
"""

import numpy as np

from libc.math cimport exp

BACKEND = "cython"


cdef inline void _stage(double a, double b, double c, double d,
                        double x1, double y1, double x2, double y2,
                        bint bumped, double r0sq, double bigr0sq, double sharp,
                        double* out) noexcept nogil:
    cdef double gx1 = 2.0 * a * x1 + c * x2 + d * y2
    cdef double gy1 = 2.0 * a * y1 + c * y2 - d * x2
    cdef double gx2 = 2.0 * b * x2 + c * x1 - d * y1
    cdef double gy2 = 2.0 * b * y2 + c * y1 + d * x1
    cdef double q, u1, u2, g1, g2, rho, drho, h, w
    if bumped:
        q = x1 * x1 + y1 * y1 + x2 * x2 + y2 * y2
        if q >= bigr0sq:
            out[0] = 0.0; out[1] = 0.0; out[2] = 0.0; out[3] = 0.0
            return
        if q > r0sq:
            u1 = bigr0sq - q
            u2 = q - r0sq
            g1 = exp(-sharp / u1)
            g2 = exp(-sharp / u2)
            rho = g1 / (g1 + g2)
            drho = -sharp * g1 * g2 * (1.0 / (u1 * u1) + 1.0 / (u2 * u2)) / ((g1 + g2) * (g1 + g2))
            h = (a * (x1 * x1 + y1 * y1) + b * (x2 * x2 + y2 * y2)
                 + c * (x1 * x2 + y1 * y2) + d * (x1 * y2 - x2 * y1))
            w = 2.0 * drho * h
            gx1 = rho * gx1 + w * x1
            gy1 = rho * gy1 + w * y1
            gx2 = rho * gx2 + w * x2
            gy2 = rho * gy2 + w * y2
    out[0] = gy1
    out[1] = -gx1
    out[2] = gy2
    out[3] = -gx2


def rk4_quad_bump(x0, acoef, bcoef, ccoef, dcoef, double h,
                  double r0sq, double bigr0sq, double sharp, bint bumped):
    """Integrate the batch x0 (m,4) over n steps; tables have 2n+1 rows."""
    x_arr = np.array(x0, dtype=np.float64, copy=True, order="C")
    a_arr = np.ascontiguousarray(acoef, dtype=np.float64)
    b_arr = np.ascontiguousarray(bcoef, dtype=np.float64)
    c_arr = np.ascontiguousarray(ccoef, dtype=np.float64)
    d_arr = np.ascontiguousarray(dcoef, dtype=np.float64)
    cdef double[:, ::1] x = x_arr
    cdef double[::1] A = a_arr
    cdef double[::1] B = b_arr
    cdef double[::1] C = c_arr
    cdef double[::1] D = d_arr
    cdef Py_ssize_t m = x.shape[0]
    cdef Py_ssize_t nsteps = (A.shape[0] - 1) // 2
    cdef Py_ssize_t i, k
    cdef Py_ssize_t i0, i1, i2
    cdef double k1[4]
    cdef double k2[4]
    cdef double k3[4]
    cdef double k4[4]
    cdef double p0, p1, p2, p3
    with nogil:
        for i in range(m):
            p0 = x[i, 0]; p1 = x[i, 1]; p2 = x[i, 2]; p3 = x[i, 3]
            for k in range(nsteps):
                i0 = 2 * k; i1 = 2 * k + 1; i2 = 2 * k + 2
                _stage(A[i0], B[i0], C[i0], D[i0], p0, p1, p2, p3,
                       bumped, r0sq, bigr0sq, sharp, k1)
                _stage(A[i1], B[i1], C[i1], D[i1],
                       p0 + 0.5 * h * k1[0], p1 + 0.5 * h * k1[1],
                       p2 + 0.5 * h * k1[2], p3 + 0.5 * h * k1[3],
                       bumped, r0sq, bigr0sq, sharp, k2)
                _stage(A[i1], B[i1], C[i1], D[i1],
                       p0 + 0.5 * h * k2[0], p1 + 0.5 * h * k2[1],
                       p2 + 0.5 * h * k2[2], p3 + 0.5 * h * k2[3],
                       bumped, r0sq, bigr0sq, sharp, k3)
                _stage(A[i2], B[i2], C[i2], D[i2],
                       p0 + h * k3[0], p1 + h * k3[1],
                       p2 + h * k3[2], p3 + h * k3[3],
                       bumped, r0sq, bigr0sq, sharp, k4)
                p0 += (h / 6.0) * (k1[0] + 2.0 * k2[0] + 2.0 * k3[0] + k4[0])
                p1 += (h / 6.0) * (k1[1] + 2.0 * k2[1] + 2.0 * k3[1] + k4[1])
                p2 += (h / 6.0) * (k1[2] + 2.0 * k2[2] + 2.0 * k3[2] + k4[2])
                p3 += (h / 6.0) * (k1[3] + 2.0 * k2[3] + 2.0 * k3[3] + k4[3])
            x[i, 0] = p0; x[i, 1] = p1; x[i, 2] = p2; x[i, 3] = p3
    return x_arr
