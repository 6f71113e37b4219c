"""NumPy implementation of the RK4 kernels; same semantics as ``_ext.rk4_core``."""

import numpy as np


def eval_system(exps, coeffs, comp, ncomp, x):
    x = np.asarray(x, dtype=np.float64)
    vals = coeffs * np.prod(np.power(x[None, :], exps), axis=1)
    return np.bincount(comp, weights=vals, minlength=ncomp)


def rk4_integrate(exps, coeffs, comp, state0, step, nsteps):
    dim = exps.shape[1]
    ny = dim - 1
    samples = np.full((nsteps + 1, dim), np.nan)
    x = np.array(state0, dtype=np.float64)
    samples[0] = x
    t_start = x[0]
    n_good = 1
    h = float(step)
    tmp = np.empty(dim)

    def f(z):
        # blow-up is detected below; silence the intermediate overflow
        with np.errstate(over="ignore", invalid="ignore"):
            return eval_system(exps, coeffs, comp, ny, z)

    for k in range(nsteps):
        t0 = x[0]
        y = x[1:]
        k1 = f(x)
        tmp[0] = t0 + 0.5 * h
        tmp[1:] = y + 0.5 * h * k1
        k2 = f(tmp)
        tmp[1:] = y + 0.5 * h * k2
        k3 = f(tmp)
        tmp[0] = t0 + h
        tmp[1:] = y + h * k3
        k4 = f(tmp)
        x = x.copy()
        x[1:] = y + h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
        x[0] = t_start + (k + 1) * h
        if not np.all(np.isfinite(x[1:])):
            break
        samples[k + 1] = x
        n_good += 1
    return samples, n_good
