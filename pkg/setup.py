"""Build script: compiles the optional Cython kernel extension.

The extension is best-effort. If Cython or a C compiler is missing the
package installs anyway and falls back to the numpy kernels at import
time (see fracfde.backend).
"""

from setuptools import setup

ext_modules = []
try:
    import numpy
    from Cython.Build import cythonize
    from setuptools import Extension

    ext_modules = cythonize(
        [
            Extension(
                "fracfde._kernels_c",
                ["src/fracfde/_kernels_c.pyx"],
                include_dirs=[numpy.get_include()],
                extra_compile_args=["-O3"],
                define_macros=[("NPY_NO_DEPRECATED_API", "NPY_1_7_API_VERSION")],
            )
        ],
        language_level=3,
    )
except ImportError:
    pass

setup(ext_modules=ext_modules)
