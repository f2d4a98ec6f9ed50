"""Build script: compiles the optional solver-kernel extension.

The package works without the extension (a NumPy fallback is selected at
import time), so a failed compile only costs speed. Floating-point flags
matter: no -ffast-math and no FMA contraction, otherwise the compiled
kernels stop being bit-identical to the fallback.
"""

import warnings

from setuptools import Extension, setup
from setuptools.command.build_ext import build_ext

try:
    import numpy
    from Cython.Build import cythonize
except ImportError:  # build without the extension
    cythonize = None


class optional_build_ext(build_ext):
    """Degrade to the pure-Python backend if the compile fails."""

    def run(self):
        try:
            super().run()
        except Exception as exc:  # noqa: BLE001 - any build failure is non-fatal
            warnings.warn(f"extension build failed ({exc}); using pure-Python kernels")

    def build_extension(self, ext):
        try:
            super().build_extension(ext)
        except Exception as exc:  # noqa: BLE001
            warnings.warn(f"building {ext.name} failed ({exc}); using pure-Python kernels")


if cythonize is not None:
    extensions = cythonize(
        [
            Extension(
                "gapsurvey._kernels._native",
                ["src/gapsurvey/_kernels/_native.pyx"],
                include_dirs=[numpy.get_include()],
                extra_compile_args=["-O3", "-ffp-contract=off"],
            )
        ],
        compiler_directives={
            "language_level": "3",
            "boundscheck": False,
            "wraparound": False,
            "cdivision": True,
            "initializedcheck": False,
        },
    )
else:
    extensions = []

setup(ext_modules=extensions, cmdclass={"build_ext": optional_build_ext})
