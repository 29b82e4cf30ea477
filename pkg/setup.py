"""Build the optional compiled Jacobi kernel.

The package works without it: ``mnarmc.linalg`` falls back to a numpy
implementation when the extension cannot be imported.
"""

import numpy as np
from setuptools import Extension, setup

try:
    from Cython.Build import cythonize
except ImportError:
    ext_modules = []
else:
    ext_modules = cythonize(
        [
            Extension(
                "mnarmc.linalg._jacobi",
                ["src/mnarmc/linalg/_jacobi.pyx"],
                include_dirs=[np.get_include()],
                extra_compile_args=["-O3"],
            )
        ],
        compiler_directives={"language_level": "3"},
    )

setup(ext_modules=ext_modules)
