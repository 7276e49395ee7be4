"""Build script for the compiled kernel extension.

The package works without the extension (a numpy fallback is selected at
import time), but the compiled kernels are what make 1000-period dense
Heisenberg evolution at L = 8..10 comfortable on one core.
"""

from setuptools import Extension, setup
from Cython.Build import cythonize

extensions = [
    Extension(
        "floqmbl.kernels._cykernels",
        ["src/floqmbl/kernels/_cykernels.pyx"],
        extra_compile_args=["-O3", "-fcx-limited-range"],
    )
]

setup(
    ext_modules=cythonize(
        extensions,
        compiler_directives={
            "language_level": 3,
            "boundscheck": False,
            "wraparound": False,
            "cdivision": True,
            "initializedcheck": False,
            "embedsignature": True,
        },
    )
)
