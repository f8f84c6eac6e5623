"""Build script: compiles the stream-scanning core when a toolchain exists.

The compiled extension is optional.  If Cython or a C compiler is missing
the package installs anyway and the numpy fallback backend is selected at
import time (see entrostream.backends).
"""

import os
import sys

from setuptools import setup
from setuptools.command.build_ext import build_ext


class optional_build_ext(build_ext):
    """Degrade to the pure-Python backend instead of failing the install."""

    def run(self):
        try:
            super().run()
        except Exception as exc:  # compiler missing, broken toolchain, ...
            self._warn(exc)

    def build_extension(self, ext):
        try:
            super().build_extension(ext)
        except Exception as exc:
            self._warn(exc)

    @staticmethod
    def _warn(exc):
        print(
            "warning: could not build the compiled stream core (%s); "
            "falling back to the numpy backend" % (exc,),
            file=sys.stderr,
        )


ext_modules = []
if os.environ.get("ENTROSTREAM_PURE_PYTHON") != "1":
    try:
        from Cython.Build import cythonize
        from setuptools import Extension

        ext_modules = cythonize(
            [
                Extension(
                    "entrostream.backends._stream_c",
                    ["src/entrostream/backends/_stream_c.pyx"],
                    extra_compile_args=["-O3"],
                )
            ],
            compiler_directives={"language_level": "3"},
        )
    except ImportError:
        pass

setup(ext_modules=ext_modules, cmdclass={"build_ext": optional_build_ext})
