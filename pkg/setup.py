"""Build script: compiles the optional Cython kernel extension.

The package works without the extension (a pure-Python backend is selected at
import time); building it just makes enumeration and matrix assembly faster.
Build in place with:

    python setup.py build_ext --inplace
"""

from setuptools import Extension, setup

ext_modules = []
try:
    import numpy
    from Cython.Build import cythonize

    ext = Extension(
        "gcgbasis._kernels",
        ["src/gcgbasis/_kernels.pyx"],
        include_dirs=[numpy.get_include()],
        define_macros=[("NPY_NO_DEPRECATED_API", "NPY_1_7_API_VERSION")],
        extra_compile_args=["-O3"],
    )
    ext_modules = cythonize(
        [ext],
        compiler_directives={"language_level": "3", "boundscheck": False, "wraparound": False},
    )
except Exception as exc:  # Cython or a C compiler may be unavailable
    print(f"gcgbasis: skipping Cython extension ({exc}); pure-Python backend will be used")

setup(ext_modules=ext_modules)
