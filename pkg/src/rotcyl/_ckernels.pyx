# cython: boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled RK4 integrator for the arc-length curvature-law ODE.

Mirrors ``rotcyl._pykernels`` operation for operation so both backends
produce the same samples up to libm rounding.
"""
import numpy as np

from libc.math cimport atan2, cos, sin


cdef inline void _rhs(double a, double b, double x1, double x2, double th,
                      double* d1, double* d2, double* d3) noexcept nogil:
    d1[0] = cos(th)
    d2[0] = sin(th)
    d3[0] = a * (x1 * x1 + x2 * x2) + b


cdef inline void _rk4_step(double a, double b, double h,
                           double x1, double x2, double th,
                           double* o1, double* o2, double* o3) noexcept nogil:
    cdef double k11, k12, k13, k21, k22, k23, k31, k32, k33, k41, k42, k43
    cdef double hh = 0.5 * h
    _rhs(a, b, x1, x2, th, &k11, &k12, &k13)
    _rhs(a, b, x1 + hh * k11, x2 + hh * k12, th + hh * k13, &k21, &k22, &k23)
    _rhs(a, b, x1 + hh * k21, x2 + hh * k22, th + hh * k23, &k31, &k32, &k33)
    _rhs(a, b, x1 + h * k31, x2 + h * k32, th + h * k33, &k41, &k42, &k43)
    o1[0] = x1 + h / 6.0 * (k11 + 2.0 * k21 + 2.0 * k31 + k41)
    o2[0] = x2 + h / 6.0 * (k12 + 2.0 * k22 + 2.0 * k32 + k42)
    o3[0] = th + h / 6.0 * (k13 + 2.0 * k23 + 2.0 * k33 + k43)


cdef inline double _dphi(double p1, double p2, double q1, double q2) noexcept nogil:
    return atan2(p1 * q2 - p2 * q1, p1 * q1 + p2 * q2)


def rk4_arc(double a, double b, double r0, double h, double phi_target,
            Py_ssize_t max_steps, double r_bound):
    """Integrate from (r0, 0) heading +x2 until the polar angle reaches phi_target.

    Returns ``(s, y, phi, status)`` with status 0 = event found (last row is
    the event point), 1 = escaped the bounding radius, 2 = step budget used up.
    """
    out_np = np.empty((max_steps + 2, 3), dtype=np.float64)
    s_np = np.empty(max_steps + 2, dtype=np.float64)
    phi_np = np.empty(max_steps + 2, dtype=np.float64)
    cdef double[:, ::1] y = out_np
    cdef double[::1] s = s_np
    cdef double[::1] ph = phi_np
    cdef double x1 = r0, x2 = 0.0, th = 1.5707963267948966, phi = 0.0
    cdef double n1, n2, n3, nphi, lo, hi, mid, m1, m2, m3
    cdef double rb2 = r_bound * r_bound
    cdef Py_ssize_t i = 0, it
    cdef int status = 2

    y[0, 0] = x1
    y[0, 1] = x2
    y[0, 2] = th
    s[0] = 0.0
    ph[0] = 0.0
    with nogil:
        while i < max_steps:
            _rk4_step(a, b, h, x1, x2, th, &n1, &n2, &n3)
            nphi = phi + _dphi(x1, x2, n1, n2)
            if nphi >= phi_target and phi < phi_target:
                lo = 0.0
                hi = h
                for it in range(80):
                    mid = 0.5 * (lo + hi)
                    _rk4_step(a, b, mid, x1, x2, th, &m1, &m2, &m3)
                    if phi + _dphi(x1, x2, m1, m2) < phi_target:
                        lo = mid
                    else:
                        hi = mid
                    if hi - lo <= 1e-17:
                        break
                _rk4_step(a, b, hi, x1, x2, th, &m1, &m2, &m3)
                i += 1
                y[i, 0] = m1
                y[i, 1] = m2
                y[i, 2] = m3
                s[i] = s[i - 1] + hi
                ph[i] = phi_target
                status = 0
                break
            i += 1
            x1 = n1
            x2 = n2
            th = n3
            phi = nphi
            y[i, 0] = x1
            y[i, 1] = x2
            y[i, 2] = th
            s[i] = i * h
            ph[i] = phi
            if x1 * x1 + x2 * x2 > rb2:
                status = 1
                break
    return s_np[: i + 1].copy(), out_np[: i + 1].copy(), phi_np[: i + 1].copy(), status
