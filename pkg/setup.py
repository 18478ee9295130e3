"""Build glue for the optional compiled accelerator.

The package is pure Python plus one Cython extension holding the hot
kernels (alpha-canonical term encoding and the finite-model evaluator).
The extension is a fast path, not a requirement: if it fails to build,
installation proceeds and the package falls back to the pure backend
at import time.
"""

import sys

from setuptools import setup
from setuptools.command.build_ext import build_ext


def extensions():
    try:
        from Cython.Build import cythonize
    except ImportError:
        return []
    return cythonize(
        ["src/microhol/_accel_c.pyx"],
        language_level="3",
        compiler_directives={"boundscheck": False, "wraparound": False},
    )


class optional_build_ext(build_ext):
    """Swallow compiler failures; the pure backend covers the contract."""

    def run(self):
        try:
            super().run()
        except Exception as exc:  # noqa: BLE001 - any build failure is non-fatal
            self._warn(exc)

    def build_extension(self, ext):
        try:
            super().build_extension(ext)
        except Exception as exc:  # noqa: BLE001
            self._warn(exc)

    @staticmethod
    def _warn(exc):
        print(
            f"warning: compiled accelerator not built ({exc!r}); "
            "using the pure-Python backend",
            file=sys.stderr,
        )


setup(ext_modules=extensions(), cmdclass={"build_ext": optional_build_ext})
