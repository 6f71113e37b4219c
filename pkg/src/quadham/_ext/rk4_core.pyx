# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Fixed-step RK4 for polynomial vector fields stored as flat term tables."""

import numpy as np
cimport numpy as cnp
from libc.math cimport isfinite

cnp.import_array()


cdef inline double _ipow(double x, long k) nogil:
    cdef double r = 1.0
    while k > 0:
        if k & 1:
            r *= x
        x *= x
        k >>= 1
    return r


cdef void _eval(const long[:, ::1] exps, const double[::1] coeffs, const long[::1] comp,
                const double[::1] x, double[::1] out) nogil:
    cdef Py_ssize_t n = exps.shape[0], nv = exps.shape[1], i, j
    cdef double v
    for i in range(out.shape[0]):
        out[i] = 0.0
    for i in range(n):
        v = coeffs[i]
        for j in range(nv):
            if exps[i, j]:
                v *= _ipow(x[j], exps[i, j])
        out[comp[i]] += v


def eval_system(long[:, ::1] exps, double[::1] coeffs, long[::1] comp, Py_ssize_t ncomp, x):
    cdef double[::1] xv = np.ascontiguousarray(x, dtype=np.float64)
    out = np.zeros(ncomp, dtype=np.float64)
    cdef double[::1] ov = out
    _eval(exps, coeffs, comp, xv, ov)
    return out


def rk4_integrate(long[:, ::1] exps, double[::1] coeffs, long[::1] comp,
                  state0, double step, Py_ssize_t nsteps):
    """Integrate d(state)/dt with state = (t, y) and dt/dt = 1.

    Returns ``(samples, n_good)``; ``samples`` has ``nsteps + 1`` rows and
    rows past ``n_good`` are left as NaN after a nonfinite state.
    """
    cdef Py_ssize_t dim = exps.shape[1], ny = dim - 1, k, i
    samples = np.full((nsteps + 1, dim), np.nan, dtype=np.float64)
    cdef double[:, ::1] sv = samples
    cdef double[::1] x = np.ascontiguousarray(state0, dtype=np.float64).copy()
    cdef double[::1] tmp = np.empty(dim, dtype=np.float64)
    cdef double[::1] k1 = np.empty(ny), k2 = np.empty(ny), k3 = np.empty(ny), k4 = np.empty(ny)
    cdef double h = step, t0
    cdef bint ok
    cdef Py_ssize_t n_good = 1
    for i in range(dim):
        sv[0, i] = x[i]
    with nogil:
        for k in range(nsteps):
            t0 = x[0]
            _eval(exps, coeffs, comp, x, k1)
            tmp[0] = t0 + 0.5 * h
            for i in range(ny):
                tmp[i + 1] = x[i + 1] + 0.5 * h * k1[i]
            _eval(exps, coeffs, comp, tmp, k2)
            for i in range(ny):
                tmp[i + 1] = x[i + 1] + 0.5 * h * k2[i]
            _eval(exps, coeffs, comp, tmp, k3)
            tmp[0] = t0 + h
            for i in range(ny):
                tmp[i + 1] = x[i + 1] + h * k3[i]
            _eval(exps, coeffs, comp, tmp, k4)
            ok = True
            for i in range(ny):
                x[i + 1] = x[i + 1] + h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i])
                if not isfinite(x[i + 1]):
                    ok = False
            # time from the step count: no drift from repeated addition
            x[0] = sv[0, 0] + (k + 1) * h
            if not ok:
                break
            for i in range(dim):
                sv[k + 1, i] = x[i]
            n_good += 1
    return samples, n_good
