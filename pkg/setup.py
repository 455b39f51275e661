"""Build script: compiles the optional SOR kernel extension when Cython and a
C compiler are available.  The package installs and runs fine without it; the
pure-numpy fallback in berrytrap.kernels is selected at import time.

Set BERRYTRAP_NO_EXT=1 to skip the extension build entirely.
"""
import os

from setuptools import setup

ext_modules = []
if os.environ.get("BERRYTRAP_NO_EXT") != "1":
    try:
        import numpy
        from Cython.Build import cythonize
        from setuptools import Extension

        ext_modules = cythonize(
            [
                Extension(
                    "berrytrap.kernels._sor",
                    ["src/berrytrap/kernels/_sor.pyx"],
                    include_dirs=[numpy.get_include()],
                    extra_compile_args=["-O3"],
                )
            ],
            compiler_directives={"language_level": "3"},
        )
    except ImportError:
        ext_modules = []

setup(ext_modules=ext_modules)
