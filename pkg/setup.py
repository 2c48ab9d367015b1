import os

from setuptools import setup

ext_modules = []
if os.environ.get("BEHAVDT_NO_EXT") != "1":
    try:
        import numpy as np
        from Cython.Build import cythonize
        from setuptools import Extension
    except ImportError:
        # no toolchain: the package runs on the numpy fallback
        pass
    else:
        ext_modules = cythonize(
            [
                Extension(
                    "behavdt._core._fast",
                    ["src/behavdt/_core/_fast.pyx"],
                    include_dirs=[np.get_include()],
                    define_macros=[("NPY_NO_DEPRECATED_API", "NPY_1_7_API_VERSION")],
                )
            ],
            language_level=3,
        )

setup(ext_modules=ext_modules)
