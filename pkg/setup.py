"""Build script for the compiled closure kernel.

The package works without the extension (a pure-Python twin is selected at
import time), so a failed compile degrades gracefully instead of blocking
installation.
"""

from setuptools import Extension, setup

try:
    from Cython.Build import cythonize

    ext_modules = cythonize(
        [
            Extension(
                "norirank._speedups",
                ["src/norirank/_speedups.pyx"],
                extra_compile_args=["-O3"],
            )
        ],
        compiler_directives={"language_level": "3"},
    )
except ImportError:
    ext_modules = []

setup(ext_modules=ext_modules)
