import warnings

from setuptools import Extension, setup
from setuptools.command.build_ext import build_ext


class OptionalBuildExt(build_ext):
    """Build the speedup extension, but fall back to pure Python on failure."""

    def run(self):
        try:
            super().run()
        except Exception as exc:  # toolchain missing or broken
            warnings.warn(f"building the compiled kernels failed ({exc}); "
                          f"installing with the pure-Python backend only")

    def build_extension(self, ext):
        try:
            super().build_extension(ext)
        except Exception as exc:
            warnings.warn(f"compiling {ext.name} failed ({exc}); "
                          f"installing with the pure-Python backend only")


def extensions():
    try:
        from Cython.Build import cythonize
    except ImportError:
        warnings.warn("Cython not available; installing with the pure-Python "
                      "backend only")
        return []
    ext = Extension(
        "sweepjoin._kernels",
        ["src/sweepjoin/_kernels.pyx"],
        language="c++",
        extra_compile_args=["-O3"],
    )
    return cythonize([ext], language_level=3)


setup(ext_modules=extensions(), cmdclass={"build_ext": OptionalBuildExt})
