"""Builds the optional compiled kernel.

The extension is marked optional: if Cython or a C compiler is missing
the install still succeeds and the package falls back to the pure-Python
kernel at import time.
"""

from setuptools import Extension, setup

ext_modules = []
try:
    from Cython.Build import cythonize

    ext = Extension("jetham._ckernel", ["src/jetham/_ckernel.pyx"])
    ext.optional = True
    ext_modules = cythonize([ext], language_level=3)
except Exception:
    pass

setup(ext_modules=ext_modules)
