"""Build hook for the optional compiled Newton-Raphson kernel.

The extension is a pure speed-up: if Cython or a C compiler is missing the
install still succeeds and the package falls back to the NumPy kernel at
import time.
"""

from setuptools import setup

ext_modules = []
try:
    from Cython.Build import cythonize
    from setuptools import Extension

    ext_modules = cythonize(
        [
            Extension(
                "corridormon._nr_c",
                ["src/corridormon/_nr_c.pyx"],
                extra_compile_args=["-O3"],
            )
        ],
        compiler_directives={"language_level": "3"},
    )
except ImportError:
    pass

setup(ext_modules=ext_modules)
