from setuptools import Extension, setup

try:
    from Cython.Build import cythonize
    import numpy as np
except ImportError:  # pure-Python install; kernels fall back at import time
    ext_modules = []
else:
    ext_modules = cythonize(
        [
            Extension(
                "kleinsail._ckernels",
                ["src/kleinsail/_ckernels.pyx"],
                include_dirs=[np.get_include()],
                optional=True,
            )
        ],
        compiler_directives={"language_level": "3"},
    )

setup(ext_modules=ext_modules)
