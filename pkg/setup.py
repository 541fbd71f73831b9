"""Build script: compiles the Cython hot-kernel extension when a toolchain is
available and falls back to the pure-Python kernels otherwise."""

import sys

from setuptools import setup
from setuptools.command.build_ext import build_ext


class OptionalBuildExt(build_ext):
    """Swallow extension build failures; the package selects the pure-Python
    kernel backend at import time when the extension is missing."""

    def run(self):
        try:
            super().run()
        except Exception as exc:  # compiler or toolchain missing
            print("thresholdwindow: extension build skipped (%s); "
                  "pure-Python kernels will be used" % exc, file=sys.stderr)

    def build_extension(self, ext):
        try:
            super().build_extension(ext)
        except Exception as exc:
            print("thresholdwindow: building %s failed (%s); "
                  "pure-Python kernels will be used" % (ext.name, exc),
                  file=sys.stderr)


def extensions():
    try:
        from Cython.Build import cythonize
    except ImportError:
        return []
    from setuptools import Extension
    return cythonize(
        [Extension(
            "thresholdwindow._ckernels",
            ["src/thresholdwindow/_ckernels.pyx"],
            extra_compile_args=["-O3"],
        )],
        language_level=3,
    )


setup(
    ext_modules=extensions(),
    cmdclass={"build_ext": OptionalBuildExt},
)
