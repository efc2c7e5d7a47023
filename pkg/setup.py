"""Build script: compiles the optional Cython kernel extension.

Set AVESOR_PURE_PYTHON=1 to skip the extension entirely; the package then
runs on the numpy/LAPACK fallback kernels selected at import time.
"""
import os

from setuptools import setup

ext_modules = []
if not os.environ.get("AVESOR_PURE_PYTHON"):
    try:
        import numpy
        from Cython.Build import cythonize
        from setuptools import Extension

        ext_modules = cythonize(
            [
                Extension(
                    "avesor._kernels",
                    ["src/avesor/_kernels.pyx"],
                    include_dirs=[numpy.get_include()],
                    define_macros=[("NPY_NO_DEPRECATED_API", "NPY_1_7_API_VERSION")],
                    extra_compile_args=["-O3"],
                )
            ],
            compiler_directives={"language_level": "3"},
        )
    except ImportError:
        ext_modules = []

setup(ext_modules=ext_modules)
