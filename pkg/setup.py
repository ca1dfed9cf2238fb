"""Builds the optional compiled kernel. The package works without it
(a pure-Python twin is selected at import), just slower."""

from setuptools import Extension, setup

try:
    from Cython.Build import cythonize
except ImportError:  # pragma: no cover - source dist without Cython
    ext_modules = []
else:
    ext_modules = cythonize(
        [
            Extension(
                "ollga._kernels_cy",
                ["src/ollga/_kernels_cy.pyx"],
                extra_compile_args=["-O3"],
            )
        ],
        language_level=3,
    )

setup(ext_modules=ext_modules)
