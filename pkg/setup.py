import os

from setuptools import setup

ext_modules = []
if not os.environ.get("STLCOMM_PURE"):
    try:
        import numpy as np
        from Cython.Build import cythonize
        from setuptools import Extension

        ext_modules = cythonize(
            [
                Extension(
                    "stlcomm.solve._pivot_c",
                    ["src/stlcomm/solve/_pivot_c.pyx"],
                    include_dirs=[np.get_include()],
                    extra_compile_args=["-O3"],
                )
            ],
            compiler_directives={"language_level": "3"},
        )
    except ImportError:
        # No Cython/numpy at build time: install pure-Python only, the
        # solver falls back to the numpy kernels at import.
        ext_modules = []

setup(ext_modules=ext_modules)
