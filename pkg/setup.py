"""Build hook: compiles the optional Cython core when a toolchain is present.

The package is fully functional without the extension; `rkkse._core` falls
back to the pure NumPy implementation at import time.  Build in place with

    python setup.py build_ext --inplace
"""

from setuptools import setup

ext_modules = []
try:
    import numpy as np
    from Cython.Build import cythonize
    from setuptools import Extension

    ext_modules = cythonize(
        [
            Extension(
                "rkkse._native",
                ["src/rkkse/_native.pyx"],
                include_dirs=[np.get_include()],
                extra_compile_args=["-O3"],
            )
        ],
        compiler_directives={"language_level": "3"},
    )
except ImportError:
    pass

setup(ext_modules=ext_modules)
