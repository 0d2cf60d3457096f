"""Build hook for the optional compiled percolation kernels.

The extension is skipped (and the pure-Python fallback used) when Cython or
a C compiler is unavailable.
"""

import os

from setuptools import setup

ext_modules = []
if os.environ.get("CTN_MBQC_NO_EXT") != "1":
    try:
        import numpy
        from Cython.Build import cythonize
        from setuptools import Extension

        ext_modules = cythonize(
            [
                Extension(
                    "ctn_mbqc._kernels._ckernels",
                    ["src/ctn_mbqc/_kernels/_ckernels.pyx"],
                    include_dirs=[numpy.get_include()],
                    define_macros=[("NPY_NO_DEPRECATED_API", "NPY_1_7_API_VERSION")],
                )
            ],
            compiler_directives={"language_level": "3", "boundscheck": False,
                                 "wraparound": False, "cdivision": True},
            quiet=True,
        )
    except ImportError:
        ext_modules = []

setup(ext_modules=ext_modules)
