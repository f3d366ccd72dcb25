"""Build hook for the optional compiled TreeRePair kernel.

Everything else is declared in pyproject.toml.  When Cython or a C++
compiler is unavailable the package installs without the extension and
falls back to the pure-Python kernel at import time.
"""

import os
import sys

from setuptools import setup
from setuptools.command.build_ext import build_ext


class OptionalBuildExt(build_ext):
    def run(self):
        try:
            super().run()
        except Exception as exc:  # noqa: BLE001 - any toolchain failure
            sys.stderr.write(f"warning: compiled kernel not built ({exc}); using pure Python\n")

    def build_extension(self, ext):
        try:
            super().build_extension(ext)
        except Exception as exc:  # noqa: BLE001
            sys.stderr.write(f"warning: {ext.name} not built ({exc}); using pure Python\n")


def extensions():
    if os.environ.get("PROOFGRAM_PURE") == "1":
        return []
    try:
        from Cython.Build import cythonize
    except ImportError:
        return []
    from setuptools import Extension
    ext = Extension("proofgram.compress._ctreestore",
                    ["src/proofgram/compress/_ctreestore.pyx"],
                    language="c++", extra_compile_args=["-O2", "-std=c++17"])
    return cythonize([ext], language_level=3, quiet=True)


setup(ext_modules=extensions(), cmdclass={"build_ext": OptionalBuildExt})
