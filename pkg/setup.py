"""Build script: compiles the optional fast kernels.

The compiled extension is a pure accelerator; if Cython or a C compiler is
unavailable the package installs anyway and falls back to the Python kernels
(see linkforge.backend). Set LINKFORGE_PURE_PYTHON=1 to skip compilation.

-ffp-contract=off keeps the C kernels bit-identical to the Python fallback:
both sides must perform the same sequence of IEEE-754 operations, so FMA
contraction is disabled.
"""

import os

from setuptools import Extension, setup
from setuptools.command.build_ext import build_ext


class OptionalBuildExt(build_ext):
    def run(self):
        try:
            super().run()
        except Exception as exc:  # compiler missing, etc.
            print(f"warning: skipping compiled kernels ({exc}); "
                  "falling back to pure-Python backend")

    def build_extension(self, ext):
        try:
            super().build_extension(ext)
        except Exception as exc:
            print(f"warning: failed to build {ext.name} ({exc}); "
                  "falling back to pure-Python backend")


ext_modules = []
cmdclass = {}
if os.environ.get("LINKFORGE_PURE_PYTHON") != "1":
    try:
        from Cython.Build import cythonize

        ext_modules = cythonize(
            [
                Extension(
                    "linkforge._kernels",
                    ["src/linkforge/_kernels.pyx"],
                    extra_compile_args=["-O2", "-ffp-contract=off",
                                        "-fno-builtin-sincos"],
                )
            ],
            language_level="3",
        )
        cmdclass["build_ext"] = OptionalBuildExt
    except ImportError:
        print("warning: Cython not available; installing pure-Python backend only")

setup(ext_modules=ext_modules, cmdclass=cmdclass)
