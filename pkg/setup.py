"""Build script: compiles the optional Cython core.

The package is fully functional without the extension (a numpy fallback is
selected at import time), so any failure here degrades to a pure-Python
install instead of aborting.
"""

from setuptools import Extension, setup

ext_modules = []
try:
    from Cython.Build import cythonize

    ext_modules = cythonize(
        [
            Extension(
                "hamloop._core",
                ["src/hamloop/_core.pyx"],
                extra_compile_args=["-O3"],
            )
        ],
        compiler_directives={"language_level": "3"},
    )
except Exception as exc:  # Cython or compiler missing
    print(f"hamloop: skipping compiled core ({exc}); pure-Python kernels will be used")

setup(ext_modules=ext_modules)
