from setuptools import Extension, setup

try:
    import numpy
    from Cython.Build import cythonize
except ImportError:  # build without the compiled core; kernels.py falls back
    ext_modules = []
else:
    ext_modules = cythonize(
        [
            Extension(
                "projkit._kernels",
                ["src/projkit/_kernels.pyx"],
                include_dirs=[numpy.get_include()],
                extra_compile_args=["-O3"],
            )
        ],
        compiler_directives={"language_level": "3"},
    )

setup(ext_modules=ext_modules)
