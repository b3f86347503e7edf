"""Build script for the optional compiled contraction kernels.

The package works without the extension (a NumPy fallback is selected at
import time), so the build degrades gracefully when Cython or a C compiler
is unavailable.
"""

from setuptools import setup

ext_modules = []
try:
    import numpy
    from Cython.Build import cythonize
    from setuptools.extension import Extension

    ext_modules = cythonize(
        [
            Extension(
                "weylprior._contract",
                ["src/weylprior/_contract.pyx"],
                include_dirs=[numpy.get_include()],
                define_macros=[("NPY_NO_DEPRECATED_API", "NPY_1_7_API_VERSION")],
            )
        ],
        language_level=3,
    )
except ImportError:
    pass

setup(ext_modules=ext_modules)
