"""Compiled finite-difference kernels for the phase-space generator.

Arrays are padded with a ring of ``GHOST`` zero cells on every side, which
realises the Dirichlet-zero boundary. Axis 0 is q, axis 1 is p.
"""

import numpy as np
from numba import njit

GHOST = 2


@njit(cache=True, nogil=True)
def generator(Wp, out, x, alpha, beta, gamma, h, order):
    """out = -(alpha p^2 + beta q^2 + gamma) W - (p d_q - q d_p) W + (alpha d_qq + beta d_pp) W / 4."""
    n = out.shape[0]
    g = GHOST
    if order == 2:
        c1 = 1.0 / (2.0 * h)
        c2 = 0.25 / (h * h)
        for i in range(n):
            q = x[i]
            ii = i + g
            for j in range(n):
                p = x[j]
                jj = j + g
                w = Wp[ii, jj]
                qm = Wp[ii - 1, jj]
                qp = Wp[ii + 1, jj]
                pm = Wp[ii, jj - 1]
                pp = Wp[ii, jj + 1]
                out[i, j] = (
                    -(alpha * p * p + beta * q * q + gamma) * w
                    - (p * (qp - qm) - q * (pp - pm)) * c1
                    + c2 * (alpha * (qp - 2.0 * w + qm) + beta * (pp - 2.0 * w + pm))
                )
    else:
        c1 = 1.0 / (12.0 * h)
        c2 = 0.25 / (12.0 * h * h)
        for i in range(n):
            q = x[i]
            ii = i + g
            for j in range(n):
                p = x[j]
                jj = j + g
                w = Wp[ii, jj]
                qm2 = Wp[ii - 2, jj]
                qm1 = Wp[ii - 1, jj]
                qp1 = Wp[ii + 1, jj]
                qp2 = Wp[ii + 2, jj]
                pm2 = Wp[ii, jj - 2]
                pm1 = Wp[ii, jj - 1]
                pp1 = Wp[ii, jj + 1]
                pp2 = Wp[ii, jj + 2]
                dq = (qm2 - 8.0 * qm1 + 8.0 * qp1 - qp2) * c1
                dp = (pm2 - 8.0 * pm1 + 8.0 * pp1 - pp2) * c1
                lq = -qm2 + 16.0 * qm1 - 30.0 * w + 16.0 * qp1 - qp2
                lp = -pm2 + 16.0 * pm1 - 30.0 * w + 16.0 * pp1 - pp2
                out[i, j] = (
                    -(alpha * p * p + beta * q * q + gamma) * w
                    - (p * dq - q * dp)
                    + c2 * (alpha * lq + beta * lp)
                )


@njit(cache=True, nogil=True)
def _stage(Wp, k, c, tmp):
    n = k.shape[0]
    g = GHOST
    for i in range(n):
        for j in range(n):
            tmp[i + g, j + g] = Wp[i + g, j + g] + c * k[i, j]


@njit(cache=True, nogil=True)
def rk4_step(Wp, tmp, k1, k2, k3, k4, x, alpha, beta, gamma, h, order, dt):
    """Advance the padded field ``Wp`` by one classical RK4 step in place.

    Returns max |W| after the step.
    """
    generator(Wp, k1, x, alpha, beta, gamma, h, order)
    _stage(Wp, k1, 0.5 * dt, tmp)
    generator(tmp, k2, x, alpha, beta, gamma, h, order)
    _stage(Wp, k2, 0.5 * dt, tmp)
    generator(tmp, k3, x, alpha, beta, gamma, h, order)
    _stage(Wp, k3, dt, tmp)
    generator(tmp, k4, x, alpha, beta, gamma, h, order)
    n = k1.shape[0]
    g = GHOST
    s = dt / 6.0
    peak = 0.0
    for i in range(n):
        for j in range(n):
            v = Wp[i + g, j + g] + s * (k1[i, j] + 2.0 * k2[i, j] + 2.0 * k3[i, j] + k4[i, j])
            Wp[i + g, j + g] = v
            a = abs(v)
            # NaN propagates into the peak
            if not a <= peak:
                peak = a
    return peak


def padded(values: np.ndarray) -> np.ndarray:
    return np.pad(np.ascontiguousarray(values, dtype=float), GHOST)
