from setuptools import Extension, setup

extensions = []
try:
    from Cython.Build import cythonize

    extensions = cythonize(
        [
            Extension(
                "seatlot._kernels_c",
                ["src/seatlot/_kernels_c.pyx"],
                optional=True,
            )
        ],
        compiler_directives={
            "language_level": "3",
            "boundscheck": False,
            "wraparound": False,
            "cdivision": True,
        },
    )
except ImportError:
    # No Cython: install with the pure-Python kernels only.
    extensions = []

setup(ext_modules=extensions)
