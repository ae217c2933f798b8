"""Build the optional compiled automata kernels.

If Cython or a C compiler is unavailable the package still installs and
falls back to the pure-Python kernels at import time.
"""

from setuptools import setup

ext_modules = []
try:
    from Cython.Build import cythonize
    from setuptools import Extension

    ext_modules = cythonize(
        [Extension("iacbv.lang._ckernels", ["src/iacbv/lang/_ckernels.pyx"], extra_compile_args=["-O3"])],
        compiler_directives={"language_level": "3"},
        quiet=True,
    )
except Exception as exc:  # pragma: no cover - depends on the build host
    print(f"building without compiled kernels: {exc}")

setup(ext_modules=ext_modules)
