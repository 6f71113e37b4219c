import os

from setuptools import setup

ext_modules = []
if not os.environ.get("QUADHAM_NO_EXT"):
    try:
        import numpy as np
        from Cython.Build import cythonize
        from setuptools import Extension

        ext_modules = cythonize(
            [
                Extension(
                    "quadham._ext.rk4_core",
                    ["src/quadham/_ext/rk4_core.pyx"],
                    include_dirs=[np.get_include()],
                    define_macros=[("NPY_NO_DEPRECATED_API", "NPY_1_7_API_VERSION")],
                )
            ],
            language_level=3,
        )
    except ImportError:
        # pure-Python install; quadham.kernels falls back to NumPy
        ext_modules = []

setup(ext_modules=ext_modules)
