# cython: boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled stepper kernel for the quadratic matrix flow.

Same interface as ``_stepper_py``; plain triple loops beat BLAS dispatch at
the small matrix sizes this engine targets.
"""

import numpy as np

NAME = "cython"

ctypedef double complex zcplx

# Dormand-Prince 5(4) tableau (rows 2..7); row 7 equals the 5th-order weights.
cdef double A2_1 = 1.0 / 5.0
cdef double A3_1 = 3.0 / 40.0, A3_2 = 9.0 / 40.0
cdef double A4_1 = 44.0 / 45.0, A4_2 = -56.0 / 15.0, A4_3 = 32.0 / 9.0
cdef double A5_1 = 19372.0 / 6561.0, A5_2 = -25360.0 / 2187.0
cdef double A5_3 = 64448.0 / 6561.0, A5_4 = -212.0 / 729.0
cdef double A6_1 = 9017.0 / 3168.0, A6_2 = -355.0 / 33.0
cdef double A6_3 = 46732.0 / 5247.0, A6_4 = 49.0 / 176.0
cdef double A6_5 = -5103.0 / 18656.0
cdef double A7_1 = 35.0 / 384.0, A7_3 = 500.0 / 1113.0, A7_4 = 125.0 / 192.0
cdef double A7_5 = -2187.0 / 6784.0, A7_6 = 11.0 / 84.0
cdef double E_1 = 71.0 / 57600.0, E_3 = -71.0 / 16695.0, E_4 = 71.0 / 1920.0
cdef double E_5 = -17253.0 / 339200.0, E_6 = 22.0 / 525.0, E_7 = -1.0 / 40.0


cdef void _rhs(zcplx[:, ::1] ups0, zcplx[:, :, ::1] y,
               zcplx[:, :, ::1] out, zcplx[:, ::1] ups) noexcept nogil:
    cdef Py_ssize_t n = ups0.shape[0]
    cdef Py_ssize_t i, j, k
    cdef zcplx acc
    for i in range(n):
        for j in range(n):
            ups[i, j] = ups0[i, j] + y[0, i, j]
    for i in range(n):
        for j in range(n):
            acc = 0
            for k in range(n):
                acc = acc + y[1, i, k] * y[1, j, k].conjugate()
            out[0, i, j] = 16.0 * acc
    for i in range(n):
        for j in range(n):
            acc = 0
            for k in range(n):
                acc = acc + ups[i, k] * y[1, k, j] + y[1, i, k] * ups[j, k]
            out[1, i, j] = -2.0 * acc


cdef void _stage(zcplx[:, :, ::1] y, double h, zcplx[:, :, :, ::1] k,
                 double* a, Py_ssize_t nst, zcplx[:, :, ::1] out) noexcept nogil:
    cdef Py_ssize_t n = y.shape[1]
    cdef Py_ssize_t c, i, j, s
    cdef zcplx acc
    for c in range(2):
        for i in range(n):
            for j in range(n):
                acc = 0
                for s in range(nst):
                    acc = acc + a[s] * k[s, c, i, j]
                out[c, i, j] = y[c, i, j] + h * acc


def flow_rhs(ups0, delta, d, out_ddelta, out_dd):
    """Flow right-hand side: ``16 D D*`` and ``-2 (Ups D + D Ups^T)``."""
    cdef zcplx[:, ::1] u0 = ups0
    cdef zcplx[:, ::1] dl = delta
    cdef zcplx[:, ::1] dm = d
    cdef zcplx[:, ::1] o0 = out_ddelta
    cdef zcplx[:, ::1] o1 = out_dd
    cdef Py_ssize_t n = u0.shape[0]
    cdef Py_ssize_t i, j, k
    cdef zcplx acc, uik
    with nogil:
        for i in range(n):
            for j in range(n):
                acc = 0
                for k in range(n):
                    acc = acc + dm[i, k] * dm[j, k].conjugate()
                o0[i, j] = 16.0 * acc
        for i in range(n):
            for j in range(n):
                acc = 0
                for k in range(n):
                    uik = u0[i, k] + dl[i, k]
                    acc = acc + uik * dm[k, j] + dm[i, k] * (u0[j, k] + dl[j, k])
                o1[i, j] = -2.0 * acc


def flow_step(ups0, y, double h, k, y5, yerr, ytmp, ups_work):
    """One Dormand-Prince 5(4) step of the flow, FSAL convention."""
    cdef zcplx[:, ::1] u0 = ups0
    cdef zcplx[:, :, ::1] yv = y
    cdef zcplx[:, :, :, ::1] kv = k
    cdef zcplx[:, :, ::1] y5v = y5
    cdef zcplx[:, :, ::1] ev = yerr
    cdef zcplx[:, :, ::1] tmp = ytmp
    cdef zcplx[:, ::1] upsw = ups_work
    cdef Py_ssize_t n = u0.shape[0]
    cdef Py_ssize_t c, i, j
    cdef double a2[1]
    cdef double a3[2]
    cdef double a4[3]
    cdef double a5[4]
    cdef double a6[5]
    cdef double a7[6]
    a2[0] = A2_1
    a3[0] = A3_1; a3[1] = A3_2
    a4[0] = A4_1; a4[1] = A4_2; a4[2] = A4_3
    a5[0] = A5_1; a5[1] = A5_2; a5[2] = A5_3; a5[3] = A5_4
    a6[0] = A6_1; a6[1] = A6_2; a6[2] = A6_3; a6[3] = A6_4; a6[4] = A6_5
    a7[0] = A7_1; a7[1] = 0.0; a7[2] = A7_3; a7[3] = A7_4; a7[4] = A7_5; a7[5] = A7_6
    with nogil:
        _stage(yv, h, kv, a2, 1, tmp)
        _rhs(u0, tmp, kv[1], upsw)
        _stage(yv, h, kv, a3, 2, tmp)
        _rhs(u0, tmp, kv[2], upsw)
        _stage(yv, h, kv, a4, 3, tmp)
        _rhs(u0, tmp, kv[3], upsw)
        _stage(yv, h, kv, a5, 4, tmp)
        _rhs(u0, tmp, kv[4], upsw)
        _stage(yv, h, kv, a6, 5, tmp)
        _rhs(u0, tmp, kv[5], upsw)
        _stage(yv, h, kv, a7, 6, tmp)
        for c in range(2):
            for i in range(n):
                for j in range(n):
                    y5v[c, i, j] = tmp[c, i, j]
        _rhs(u0, y5v, kv[6], upsw)
        for c in range(2):
            for i in range(n):
                for j in range(n):
                    ev[c, i, j] = h * (
                        E_1 * kv[0, c, i, j]
                        + E_3 * kv[2, c, i, j]
                        + E_4 * kv[3, c, i, j]
                        + E_5 * kv[4, c, i, j]
                        + E_6 * kv[5, c, i, j]
                        + E_7 * kv[6, c, i, j]
                    )
