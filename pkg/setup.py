"""Build script for the optional compiled kernel core.

The package is pure Python plus one small Cython extension holding the hot
inner loops (simplex pivoting, vertex-tuple enumeration).  If Cython or a C
compiler is unavailable the build silently skips the extension; the package
then runs on the numpy fallback kernels selected at import time.
"""

from setuptools import Extension, setup

try:
    import numpy as np
    from Cython.Build import cythonize

    ext_modules = cythonize(
        [
            Extension(
                "veronese._kernels.ckernels",
                ["src/veronese/_kernels/ckernels.pyx"],
                include_dirs=[np.get_include()],
                # fp-contract off: the pivot kernel must match the numpy
                # fallback bit-for-bit, so FMA fusion is disallowed
                extra_compile_args=["-O3", "-ffp-contract=off"],
            )
        ],
        language_level=3,
    )
except ImportError:
    ext_modules = []

setup(ext_modules=ext_modules)
