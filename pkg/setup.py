from setuptools import Extension, setup

# The interpolation kernel is optional: when Cython (or a C compiler) is not
# available the package falls back to the pure-Python kernel at import time.
try:
    import numpy as np
    from Cython.Build import cythonize

    ext_modules = cythonize(
        [
            Extension(
                "autosimp._scores",
                ["src/autosimp/_scores.pyx"],
                include_dirs=[np.get_include()],
                # keep scalar FP semantics identical to the Python kernel
                extra_compile_args=["-O3", "-ffp-contract=off"],
            )
        ],
        language_level="3",
    )
except ImportError:
    ext_modules = []

setup(ext_modules=ext_modules)
