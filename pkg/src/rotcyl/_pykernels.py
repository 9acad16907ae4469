"""Pure-Python fallback for the arc integrator (same arithmetic as the Cython kernel)."""
from math import atan2, cos, sin

import numpy as np


def _rk4_step(a, b, h, x1, x2, th):
    hh = 0.5 * h
    k11, k12, k13 = cos(th), sin(th), a * (x1 * x1 + x2 * x2) + b
    y1, y2, y3 = x1 + hh * k11, x2 + hh * k12, th + hh * k13
    k21, k22, k23 = cos(y3), sin(y3), a * (y1 * y1 + y2 * y2) + b
    y1, y2, y3 = x1 + hh * k21, x2 + hh * k22, th + hh * k23
    k31, k32, k33 = cos(y3), sin(y3), a * (y1 * y1 + y2 * y2) + b
    y1, y2, y3 = x1 + h * k31, x2 + h * k32, th + h * k33
    k41, k42, k43 = cos(y3), sin(y3), a * (y1 * y1 + y2 * y2) + b
    return (
        x1 + h / 6.0 * (k11 + 2.0 * k21 + 2.0 * k31 + k41),
        x2 + h / 6.0 * (k12 + 2.0 * k22 + 2.0 * k32 + k42),
        th + h / 6.0 * (k13 + 2.0 * k23 + 2.0 * k33 + k43),
    )


def _dphi(p1, p2, q1, q2):
    return atan2(p1 * q2 - p2 * q1, p1 * q1 + p2 * q2)


def rk4_arc(a, b, r0, h, phi_target, max_steps, r_bound):
    """Integrate from (r0, 0) heading +x2 until the polar angle reaches phi_target.

    Returns ``(s, y, phi, status)``; status 0 = event found (last row is the
    event point), 1 = escaped the bounding radius, 2 = step budget used up.
    """
    x1, x2, th, phi = float(r0), 0.0, 1.5707963267948966, 0.0
    rb2 = r_bound * r_bound
    s = [0.0]
    ys = [(x1, x2, th)]
    phis = [0.0]
    status = 2
    i = 0
    while i < max_steps:
        n1, n2, n3 = _rk4_step(a, b, h, x1, x2, th)
        nphi = phi + _dphi(x1, x2, n1, n2)
        if nphi >= phi_target and phi < phi_target:
            lo, hi = 0.0, h
            for _ in range(80):
                mid = 0.5 * (lo + hi)
                m1, m2, _m3 = _rk4_step(a, b, mid, x1, x2, th)
                if phi + _dphi(x1, x2, m1, m2) < phi_target:
                    lo = mid
                else:
                    hi = mid
                if hi - lo <= 1e-17:
                    break
            ys.append(_rk4_step(a, b, hi, x1, x2, th))
            s.append(s[-1] + hi)
            phis.append(phi_target)
            status = 0
            break
        i += 1
        x1, x2, th, phi = n1, n2, n3, nphi
        ys.append((x1, x2, th))
        s.append(i * h)
        phis.append(phi)
        if x1 * x1 + x2 * x2 > rb2:
            status = 1
            break
    return np.array(s), np.array(ys), np.array(phis), status
