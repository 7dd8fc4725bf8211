"""Build script: compiles the optional exact-rank kernel.

The package is pure Python and fully functional without the extension;
srk._kernels falls back to the interpreted implementation when the
compiled module is absent.  Any failure here (no Cython, no C compiler)
therefore degrades to a pure-Python install instead of aborting.
"""

import os

from setuptools import Extension, setup
from setuptools.command.build_ext import build_ext


class optional_build_ext(build_ext):
    """build_ext that downgrades compiler failures to a warning."""

    def run(self) -> None:
        try:
            super().run()
        except Exception as exc:  # compiler missing entirely
            self._warn(exc)

    def build_extension(self, ext) -> None:
        try:
            super().build_extension(ext)
        except Exception as exc:
            self._warn(exc)

    @staticmethod
    def _warn(exc: Exception) -> None:
        print(f"warning: skipping compiled kernel ({exc!r}); "
              "falling back to the pure-Python rank routine")


def extensions():
    if os.environ.get("SRK_NO_EXT"):
        return []
    try:
        from Cython.Build import cythonize
    except ImportError:
        return []
    return cythonize(
        [Extension("srk._rankcore", ["src/srk/_rankcore.pyx"])],
        compiler_directives={"language_level": "3"},
    )


setup(ext_modules=extensions(), cmdclass={"build_ext": optional_build_ext})
