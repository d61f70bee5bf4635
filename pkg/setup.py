"""Build script: compiles the optional Cython transport kernel.

The package is fully functional without the extension (a NumPy fallback is
selected at import time), so any failure here downgrades to a pure-Python
build instead of aborting the install.
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
                "cubicrp2._kernels",
                ["src/cubicrp2/_kernels.pyx"],
                include_dirs=[np.get_include()],
                define_macros=[("NPY_NO_DEPRECATED_API", "NPY_1_7_API_VERSION")],
                extra_compile_args=["-O3"],
            )
        ],
        compiler_directives={"language_level": "3"},
    )
except Exception as exc:  # pragma: no cover - exercised only on broken toolchains
    print(f"cubicrp2: skipping compiled kernels ({exc!r}); using pure-Python fallback")

setup(ext_modules=ext_modules)
