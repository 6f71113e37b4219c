"""Kernel selection: the compiled extension if importable, else the NumPy fallback.

Set ``QUADHAM_PURE_PYTHON=1`` to force the fallback.
"""

import os

import numpy as np

from .poly import CoeffPoly

if os.environ.get("QUADHAM_PURE_PYTHON"):
    from . import _fallback as _impl

    BACKEND = "python"
else:
    try:
        from ._ext import rk4_core as _impl

        BACKEND = "cython"
    except ImportError:  # extension not built
        from . import _fallback as _impl

        BACKEND = "python"

from . import _fallback

__all__ = ["BACKEND", "CompiledSystem", "compile_system"]


class CompiledSystem:
    """Flat float term table for a list of polynomials sharing one signature."""

    def __init__(self, polys, backend=None):
        polys = list(polys)
        if not polys:
            raise ValueError("empty system")
        nv = polys[0].nvars
        exps, coeffs, comp = [], [], []
        for k, f in enumerate(polys):
            if f.nvars != nv:
                raise ValueError("polynomials must share a signature")
            for e, c in sorted(f.items()):
                exps.append(e)
                coeffs.append(float(c))
                comp.append(k)
        if not exps:
            exps, coeffs, comp = [(0,) * nv], [0.0], [0]
        self.exps = np.ascontiguousarray(exps, dtype=np.int_).reshape(-1, nv)
        self.coeffs = np.ascontiguousarray(coeffs, dtype=np.float64)
        self.comp = np.ascontiguousarray(comp, dtype=np.int_)
        self.ncomp = len(polys)
        self.nvars = nv
        self._impl = _fallback if backend == "python" else _impl

    def __call__(self, x):
        return self._impl.eval_system(self.exps, self.coeffs, self.comp, self.ncomp, np.asarray(x, dtype=np.float64))

    def rk4(self, state0, step, nsteps):
        if self.ncomp != self.nvars - 1:
            raise ValueError("RK4 needs one component per non-time variable")
        return self._impl.rk4_integrate(
            self.exps, self.coeffs, self.comp, np.asarray(state0, dtype=np.float64), float(step), int(nsteps)
        )


def compile_system(polys, backend=None) -> CompiledSystem:
    return CompiledSystem(polys, backend)
