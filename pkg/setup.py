import numpy as np
from setuptools import setup

# The compiled cone-quadrature kernel is optional: the package falls back to a
# numpy implementation at import time if the extension is missing.
try:
    from Cython.Build import cythonize

    ext_modules = cythonize(
        ["src/artifact/_conekernel.pyx"],
        language_level=3,
        annotate=False,
    )
except ImportError:
    ext_modules = []

setup(
    ext_modules=ext_modules,
    include_dirs=[np.get_include()],
)
