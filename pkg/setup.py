"""Build hook for the optional compiled kernels.

The package is fully functional without the extension: ``windcop.kernels``
falls back to the pure-Python implementations when ``_ckernels`` is missing.
"""
import os
import sys

from setuptools import setup

ext_modules = []
if os.environ.get("WINDCOP_NO_EXT", "") != "1":
    try:
        import numpy as np
        from Cython.Build import cythonize
        from setuptools import Extension

        ext_modules = cythonize(
            [
                Extension(
                    "windcop._ckernels",
                    ["src/windcop/_ckernels.pyx"],
                    include_dirs=[np.get_include()],
                    define_macros=[("NPY_NO_DEPRECATED_API", "NPY_1_7_API_VERSION")],
                    extra_compile_args=["-O3"],
                )
            ],
            compiler_directives={"language_level": "3"},
        )
    except Exception as exc:  # pragma: no cover - build environment dependent
        print(f"windcop: building without compiled kernels ({exc})", file=sys.stderr)

setup(ext_modules=ext_modules)
