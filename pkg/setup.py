import os

import numpy
from setuptools import Extension, setup

try:
    from Cython.Build import cythonize
except ImportError:
    cythonize = None

ext_modules = []
if cythonize is not None and os.path.exists("src/ehroute/_backend/_ckern.pyx"):
    ext_modules = cythonize(
        [
            Extension(
                "ehroute._backend._ckern",
                ["src/ehroute/_backend/_ckern.pyx"],
                language="c++",
                include_dirs=[numpy.get_include()],
                extra_compile_args=["-O3", "-std=c++17"],
                define_macros=[("NPY_NO_DEPRECATED_API", "NPY_1_7_API_VERSION")],
            )
        ],
        language_level=3,
    )

# The extension is an accelerator; the package installs and works without it.
setup(ext_modules=ext_modules)
