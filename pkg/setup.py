"""Build the optional Cython kernels.

The package works without them; ``stablevar._backend`` falls back to
pure NumPy when the extension cannot be imported.
"""

import os

from setuptools import setup

ext_modules = []
if not os.environ.get("STABLEVAR_NO_EXTENSION"):
    try:
        import numpy as np
        from Cython.Build import cythonize
        from setuptools import Extension
    except ImportError:
        pass
    else:
        ext_modules = cythonize(
            [
                Extension(
                    "stablevar._kernels",
                    ["src/stablevar/_kernels.pyx"],
                    include_dirs=[np.get_include()],
                    extra_compile_args=["-O3"],
                )
            ],
            compiler_directives={
                "language_level": "3",
                "boundscheck": False,
                "wraparound": False,
                "cdivision": True,
            },
        )

setup(ext_modules=ext_modules)
