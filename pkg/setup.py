import numpy
from setuptools import Extension, setup
from Cython.Build import cythonize

# The compiled kernel core is an optional accelerator: if the build fails,
# the package falls back to the pure-numpy kernels at import time.
extensions = [
    Extension(
        "memshape._kernels",
        ["src/memshape/_kernels.pyx"],
        include_dirs=[numpy.get_include()],
        extra_compile_args=["-O3"],
        optional=True,
    )
]

setup(
    ext_modules=cythonize(
        extensions,
        compiler_directives={"language_level": "3"},
    )
)
