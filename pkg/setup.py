import numpy as np
from setuptools import Extension, setup

try:
    from Cython.Build import cythonize
except ImportError:
    # Builds without Cython fall back to the pure-numpy kernel at import.
    ext_modules = []
else:
    ext = Extension(
        "lassorand._kernel._cd_fast",
        ["src/lassorand/_kernel/_cd_fast.pyx"],
        include_dirs=[np.get_include()],
        define_macros=[("NPY_NO_DEPRECATED_API", "NPY_1_7_API_VERSION")],
        extra_compile_args=["-O3", "-march=native", "-funroll-loops"],
    )
    ext_modules = cythonize([ext], language_level="3")

setup(ext_modules=ext_modules)
