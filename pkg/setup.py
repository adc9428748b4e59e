"""Build hook for the optional compiled slicing kernels.

The package works without the extension (a NumPy fallback is selected at
import time); building it just makes large-mesh classification faster.
`-ffp-contract=off` keeps the C kernels bit-identical to the NumPy path.
"""
from setuptools import setup

try:
    import numpy
    from Cython.Build import cythonize
    from setuptools import Extension
except ImportError:
    ext_modules = []
else:
    ext_modules = cythonize(
        [
            Extension(
                "sliceroom.kernels._slicing_cy",
                ["src/sliceroom/kernels/_slicing_cy.pyx"],
                include_dirs=[numpy.get_include()],
                extra_compile_args=["-O3", "-ffp-contract=off"],
            )
        ],
        language_level="3",
    )

setup(ext_modules=ext_modules)
