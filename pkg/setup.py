"""Build script for the compiled kernel extension.

The package is fully functional without the extension (the pure-Python
kernels in ``annulus._kernels.pure`` are selected at import time when the
compiled module is missing); building it just makes large sweeps fast.
"""
import numpy as np
from Cython.Build import cythonize
from setuptools import Extension, setup

ext = Extension(
    "annulus._kernels._fast",
    ["src/annulus/_kernels/_fast.pyx"],
    include_dirs=[np.get_include()],
    define_macros=[("NPY_NO_DEPRECATED_API", "NPY_1_7_API_VERSION")],
)

setup(ext_modules=cythonize([ext], language_level=3))
