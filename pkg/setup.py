"""Build script for the optional compiled kernel.

The package is fully functional without the extension: the import
machinery in ``twinmeta._kernel`` falls back to a numpy implementation
of the same routines when the compiled module is missing.
"""
from setuptools import setup

try:
    from Cython.Build import cythonize
    from setuptools import Extension

    extensions = cythonize(
        [
            Extension(
                "twinmeta._kernel._core",
                ["src/twinmeta/_kernel/_core.pyx"],
                extra_compile_args=["-O3"],
            )
        ],
        language_level=3,
    )
except ImportError:
    extensions = []

setup(ext_modules=extensions)
