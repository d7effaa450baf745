# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled batch kernels; same API and semantics as `_kernels_py`."""

import numpy as np

from libc.math cimport cos, cosh, sin, tanh

BACKEND = "cython"

TYPE_I = 1
TYPE_II = 2
CONSTANT = 3

ARC_LENGTH = 1
AREA = 2

cdef double Z_CLIP = 350.0


cdef inline double _sech2(double z) nogil:
    cdef double ch
    if z > Z_CLIP:
        z = Z_CLIP
    elif z < -Z_CLIP:
        z = -Z_CLIP
    ch = cosh(z)
    return 1.0 / (ch * ch)


def curvature_batch(int kind, double c0, double gamma, double u0, double r0,
                    double const_value, u):
    cdef double[::1] uu = np.ascontiguousarray(u, dtype=np.float64)
    cdef Py_ssize_t m = uu.shape[0]
    c_arr = np.empty(m)
    cd_arr = np.empty(m)
    cdef double[::1] c = c_arr
    cdef double[::1] cd = cd_arr
    cdef Py_ssize_t i
    cdef double z, t, s2, k, d
    if kind == CONSTANT:
        for i in range(m):
            c[i] = const_value
            cd[i] = 0.0
        return c_arr, cd_arr
    if kind == TYPE_I:
        for i in range(m):
            z = gamma * (uu[i] - u0)
            t = tanh(z)
            s2 = _sech2(z)
            c[i] = 0.5 * r0 * c0 * (1.0 - t)
            cd[i] = -0.5 * r0 * c0 * gamma * s2
    else:
        k = 0.5 * r0 * c0 / u0
        for i in range(m):
            d = uu[i] - u0
            z = gamma * d
            t = tanh(z)
            s2 = _sech2(z)
            c[i] = -k * d * (1.0 - t)
            cd[i] = -k * (1.0 - t) + k * gamma * d * s2
    return c_arr, cd_arr


def curvature_partials_batch(int kind, double c0, double gamma, double u0,
                             double r0, u):
    cdef double[::1] uu = np.ascontiguousarray(u, dtype=np.float64)
    cdef Py_ssize_t m = uu.shape[0]
    dc_arr = np.empty((3, m))
    dcd_arr = np.empty((3, m))
    cdef double[:, ::1] dc = dc_arr
    cdef double[:, ::1] dcd = dcd_arr
    cdef Py_ssize_t i
    cdef double z, t, s2, k, d, omt
    if kind == TYPE_I:
        for i in range(m):
            d = uu[i] - u0
            z = gamma * d
            t = tanh(z)
            s2 = _sech2(z)
            omt = 1.0 - t
            dc[0, i] = 0.5 * r0 * omt
            dc[1, i] = -0.5 * r0 * c0 * d * s2
            dc[2, i] = 0.5 * r0 * c0 * gamma * s2
            dcd[0, i] = -0.5 * r0 * gamma * s2
            dcd[1, i] = -0.5 * r0 * c0 * s2 + r0 * c0 * gamma * d * s2 * t
            dcd[2, i] = -r0 * c0 * gamma * gamma * s2 * t
    else:
        k = 0.5 * r0 * c0 / u0
        for i in range(m):
            d = uu[i] - u0
            z = gamma * d
            t = tanh(z)
            s2 = _sech2(z)
            omt = 1.0 - t
            dc[0, i] = -(0.5 * r0 / u0) * d * omt
            dc[1, i] = k * d * d * s2
            dc[2, i] = (0.5 * r0 * c0 / (u0 * u0)) * d * omt + k * omt - k * gamma * d * s2
            dcd[0, i] = -(0.5 * r0 / u0) * omt + (0.5 * r0 * gamma / u0) * d * s2
            dcd[1, i] = 2.0 * k * d * s2 - 2.0 * k * gamma * d * d * s2 * t
            dcd[2, i] = (
                (0.5 * r0 * c0 / (u0 * u0)) * omt
                - (r0 * c0 * gamma / u0) * s2
                - (0.5 * r0 * c0 * gamma / (u0 * u0)) * d * s2
                + (r0 * c0 * gamma * gamma / u0) * d * s2 * t
            )
    return dc_arr, dcd_arr


def residual_batch(int form, double kappa, x, xdot, c, cdot):
    cdef double[:, ::1] xv = np.ascontiguousarray(x, dtype=np.float64)
    cdef double[:, ::1] xd = np.ascontiguousarray(xdot, dtype=np.float64)
    cdef double[::1] cv = np.ascontiguousarray(c, dtype=np.float64)
    cdef double[::1] cd = np.ascontiguousarray(cdot, dtype=np.float64)
    cdef Py_ssize_t m = xv.shape[1]
    F_arr = np.empty((6, m))
    cdef double[:, ::1] F = F_arr
    cdef Py_ssize_t i
    cdef double x1, x3, x4, x5, x6, s3, c3, hc, q
    if form == ARC_LENGTH:
        for i in range(m):
            x1 = xv[0, i]; x3 = xv[2, i]; x4 = xv[3, i]; x5 = xv[4, i]; x6 = xv[5, i]
            s3 = sin(x3); c3 = cos(x3)
            hc = x4 - cv[i]
            q = x4 - s3 / x1
            F[0, i] = xd[0, i] - c3
            F[1, i] = xd[1, i] - s3
            F[2, i] = xd[2, i] - 2.0 * x4 + s3 / x1
            F[3, i] = xd[3, i] - x5 / x1 - cd[i]
            F[4, i] = (xd[4, i]
                       - 2.0 * x1 * x4 * (hc * hc + x6 / kappa)
                       + 2.0 * x1 * hc * (x4 * x4 + q * q))
            F[5, i] = xd[5, i] - 2.0 * kappa * cd[i] * x4 + 2.0 * kappa * cv[i] * cd[i]
    else:
        for i in range(m):
            x1 = xv[0, i]; x3 = xv[2, i]; x4 = xv[3, i]; x5 = xv[4, i]; x6 = xv[5, i]
            s3 = sin(x3); c3 = cos(x3)
            hc = x4 - cv[i]
            q = x4 - s3 / x1
            F[0, i] = xd[0, i] - c3 / x1
            F[1, i] = xd[1, i] - s3 / x1
            F[2, i] = xd[2, i] - 2.0 * x4 / x1 + s3 / (x1 * x1)
            F[3, i] = xd[3, i] - x5 / (x1 * x1) - cd[i]
            F[4, i] = (xd[4, i]
                       - 2.0 * x4 * (hc * hc + x6 / kappa)
                       + 2.0 * hc * (x4 * x4 + q * q))
            F[5, i] = xd[5, i] - 2.0 * kappa * cd[i] * x4 + 2.0 * kappa * cv[i] * cd[i]
    return F_arr


def state_jacobian_batch(int form, double kappa, x, c, cdot):
    cdef double[:, ::1] xv = np.ascontiguousarray(x, dtype=np.float64)
    cdef double[::1] cv = np.ascontiguousarray(c, dtype=np.float64)
    cdef double[::1] cd = np.ascontiguousarray(cdot, dtype=np.float64)
    cdef Py_ssize_t m = xv.shape[1]
    J_arr = np.zeros((m, 6, 6))
    cdef double[:, :, ::1] J = J_arr
    cdef Py_ssize_t i
    cdef double x1, x3, x4, x5, x6, s3, c3, hc, q
    if form == ARC_LENGTH:
        for i in range(m):
            x1 = xv[0, i]; x3 = xv[2, i]; x4 = xv[3, i]; x5 = xv[4, i]; x6 = xv[5, i]
            s3 = sin(x3); c3 = cos(x3)
            hc = x4 - cv[i]
            q = x4 - s3 / x1
            J[i, 0, 2] = s3
            J[i, 1, 2] = -c3
            J[i, 2, 0] = -s3 / (x1 * x1)
            J[i, 2, 2] = c3 / x1
            J[i, 2, 3] = -2.0
            J[i, 3, 0] = x5 / (x1 * x1)
            J[i, 3, 4] = -1.0 / x1
            J[i, 4, 0] = (-2.0 * x4 * (hc * hc + x6 / kappa)
                          + 2.0 * hc * x4 * x4
                          + 2.0 * hc * q * q
                          + 4.0 * x1 * hc * (s3 / (x1 * x1)) * q)
            J[i, 4, 2] = 4.0 * x1 * hc * (-c3 / x1) * q
            J[i, 4, 3] = (-2.0 * x1 * hc * hc
                          - 2.0 * x1 * x6 / kappa
                          + 2.0 * x1 * x4 * x4
                          + 2.0 * x1 * q * q
                          + 4.0 * x1 * hc * q)
            J[i, 4, 5] = -2.0 * x1 * x4 / kappa
            J[i, 5, 3] = -2.0 * kappa * cd[i]
    else:
        for i in range(m):
            x1 = xv[0, i]; x3 = xv[2, i]; x4 = xv[3, i]; x5 = xv[4, i]; x6 = xv[5, i]
            s3 = sin(x3); c3 = cos(x3)
            hc = x4 - cv[i]
            q = x4 - s3 / x1
            J[i, 0, 0] = c3 / (x1 * x1)
            J[i, 0, 2] = s3 / x1
            J[i, 1, 0] = s3 / (x1 * x1)
            J[i, 1, 2] = -c3 / x1
            J[i, 2, 0] = 2.0 * x4 / (x1 * x1) - 2.0 * s3 / (x1 * x1 * x1)
            J[i, 2, 2] = c3 / (x1 * x1)
            J[i, 2, 3] = -2.0 / x1
            J[i, 3, 0] = 2.0 * x5 / (x1 * x1 * x1)
            J[i, 3, 4] = -1.0 / (x1 * x1)
            J[i, 4, 0] = 4.0 * hc * (s3 / (x1 * x1)) * q
            J[i, 4, 2] = 4.0 * hc * (-c3 / x1) * q
            J[i, 4, 3] = (-2.0 * hc * hc
                          - 2.0 * x6 / kappa
                          + 2.0 * x4 * x4
                          + 2.0 * q * q
                          + 4.0 * hc * q)
            J[i, 4, 5] = -2.0 * x4 / kappa
            J[i, 5, 3] = -2.0 * kappa * cd[i]
    return J_arr


def param_jacobian_batch(int form, double kappa, x, c, cdot, dc, dcd):
    cdef double[:, ::1] xv = np.ascontiguousarray(x, dtype=np.float64)
    cdef double[::1] cv = np.ascontiguousarray(c, dtype=np.float64)
    cdef double[::1] cd = np.ascontiguousarray(cdot, dtype=np.float64)
    cdef double[:, ::1] dcv = np.ascontiguousarray(dc, dtype=np.float64)
    cdef double[:, ::1] dcdv = np.ascontiguousarray(dcd, dtype=np.float64)
    cdef Py_ssize_t m = xv.shape[1]
    P_arr = np.zeros((m, 6, 3))
    cdef double[:, :, ::1] P = P_arr
    cdef Py_ssize_t i, j
    cdef double x1, x3, x4, x6, s3, hc, q, w5
    for i in range(m):
        x1 = xv[0, i]; x3 = xv[2, i]; x4 = xv[3, i]; x6 = xv[5, i]
        s3 = sin(x3)
        hc = x4 - cv[i]
        q = x4 - s3 / x1
        if form == ARC_LENGTH:
            w5 = 4.0 * x1 * x4 * hc - 2.0 * x1 * (x4 * x4 + q * q)
        else:
            w5 = 4.0 * x4 * hc - 2.0 * (x4 * x4 + q * q)
        for j in range(3):
            P[i, 3, j] = -dcdv[j, i]
            P[i, 4, j] = w5 * dcv[j, i]
            P[i, 5, j] = (-2.0 * kappa * x4 * dcdv[j, i]
                          + 2.0 * kappa * (dcv[j, i] * cd[i] + cv[i] * dcdv[j, i]))
    return P_arr
