"""Build script: compiles the optional Cython fast path for graph aggregation.

The package works without the extension (a numpy fallback is selected at
import time), so a failed compile downgrades to a warning instead of
aborting the install.
"""

import warnings

from setuptools import setup

ext_modules = []
try:
    import numpy
    from Cython.Build import cythonize

    ext_modules = cythonize(
        ["src/punk/kernels/_fastops.pyx"],
        language_level=3,
    )
    include_dirs = [numpy.get_include()]
except Exception as exc:  # pragma: no cover - build-env dependent
    warnings.warn(f"skipping Cython extension build: {exc}")
    include_dirs = []

setup(ext_modules=ext_modules, include_dirs=include_dirs)
