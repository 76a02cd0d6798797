"""Build script: compiles the memory-convolution extension when possible.

The package works without the extension (a numpy fallback is selected at
import time), so any compilation failure downgrades to a pure-Python
install instead of breaking it.
"""

from setuptools import setup

ext_modules = []
try:
    from Cython.Build import cythonize

    ext_modules = cythonize(
        ["src/fracsteer/_memcore.pyx"],
        compiler_directives={"language_level": "3"},
    )
except Exception:
    pass

setup(ext_modules=ext_modules)
