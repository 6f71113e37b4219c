"""Compiled numerical kernels.

Modules
-------
rk4_core
    Polynomial vector-field evaluation and fixed-step RK4 stepping, written in
    ``pyx`` format for :mod:`cython`. :mod:`quadham.kernels` falls back to a
    NumPy implementation when the extension is not built.
"""
