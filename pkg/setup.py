import numpy as np
from Cython.Build import cythonize
from setuptools import Extension, setup

# The compiled core is optional: conclab.kernels falls back to pure Python
# when conclab._kernels cannot be imported.
extensions = [
    Extension(
        "conclab._kernels",
        ["src/conclab/_kernels.pyx"],
        include_dirs=[np.get_include()],
        extra_compile_args=["-O3"],
    )
]

setup(
    ext_modules=cythonize(
        extensions,
        compiler_directives={"language_level": "3"},
    )
)
