"""Build script for the optional compiled kernel extension.

The package works without the extension (a NumPy/SciPy fallback is selected
at import time); building it just makes the pixel kernels faster.
"""

import numpy
from setuptools import Extension, setup

try:
    from Cython.Build import cythonize
except ImportError:
    cythonize = None

if cythonize is not None:
    ext_modules = cythonize(
        [
            Extension(
                "wmbench.imagekit._kernels",
                ["src/wmbench/imagekit/_kernels.pyx"],
                include_dirs=[numpy.get_include()],
                extra_compile_args=["-O3"],
            )
        ],
        language_level=3,
    )
else:
    ext_modules = []

setup(ext_modules=ext_modules)
