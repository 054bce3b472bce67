"""Build the optional compiled search kernel; fall back to pure Python."""

from setuptools import setup

try:
    from Cython.Build import cythonize

    ext_modules = cythonize(
        ["src/sbo/_bruteforce.pyx"], compiler_directives={"language_level": 3}
    )
except ImportError:
    ext_modules = []

setup(ext_modules=ext_modules)
