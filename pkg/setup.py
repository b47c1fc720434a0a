import numpy as np
from setuptools import Extension, setup

try:
    from Cython.Build import cythonize
except ImportError:  # pure-Python install; lpmlab falls back to numpy kernels
    ext_modules = []
else:
    ext_modules = cythonize(
        [
            Extension(
                "lpmlab._core",
                ["src/lpmlab/_core.pyx"],
                include_dirs=[np.get_include()],
                language="c++",
                extra_compile_args=["-O3", "-ffp-contract=off"],
                optional=True,
            )
        ],
        compiler_directives={"language_level": "3", "boundscheck": False, "wraparound": False},
    )

setup(ext_modules=ext_modules)
