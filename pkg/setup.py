from setuptools import Extension, setup
from Cython.Build import cythonize

ext = Extension(
    "ntplan._kernels._core",
    ["src/ntplan/_kernels/_core.pyx"],
)

setup(ext_modules=cythonize([ext], language_level=3))
