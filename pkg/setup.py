# The Cython scanner is optional: without a compiler the package falls back
# to the pure-Python scanner at import time.
import os

from setuptools import setup

ext_modules = []
if os.environ.get("OMPADVISOR_NO_EXT") != "1":
    try:
        from Cython.Build import cythonize
        from setuptools import Extension

        ext_modules = cythonize(
            [Extension("ompadvisor.frontend._cscan", ["src/ompadvisor/frontend/_cscan.pyx"],
                       extra_compile_args=["-O3"])],
            compiler_directives={"language_level": "3", "boundscheck": False, "wraparound": False},
        )
    except ImportError:
        ext_modules = []

setup(ext_modules=ext_modules)
