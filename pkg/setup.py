import numpy as np
from setuptools import Extension, setup

# The CSR kernels are optional: the package falls back to vectorized numpy
# implementations when the extension is missing (see activemesh.sparse).
try:
    from Cython.Build import cythonize

    extensions = cythonize(
        [
            Extension(
                "activemesh._csr_c",
                ["src/activemesh/_csr_c.pyx"],
                include_dirs=[np.get_include()],
                extra_compile_args=["-O3"],
            )
        ],
        compiler_directives={"language_level": "3"},
    )
except ImportError:
    extensions = []

setup(ext_modules=extensions)
