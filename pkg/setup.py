import numpy as np
from setuptools import Extension, setup

from Cython.Build import cythonize

extensions = [
    Extension(
        "ellflow._stepper_cy",
        ["src/ellflow/_stepper_cy.pyx"],
        include_dirs=[np.get_include()],
        extra_compile_args=["-O3"],
    )
]

setup(
    ext_modules=cythonize(extensions, compiler_directives={"language_level": "3"}),
)
