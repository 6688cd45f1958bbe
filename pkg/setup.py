from Cython.Build import cythonize
from setuptools import Extension, setup

# The fixed-point power-control kernel is the only compiled piece; it uses
# typed memoryviews, so no NumPy headers are required at build time.
extensions = [
    Extension(
        "cfmaxmin._kernels._fixed_point_cy",
        ["src/cfmaxmin/_kernels/_fixed_point_cy.pyx"],
        extra_compile_args=["-O3"],
    )
]

setup(ext_modules=cythonize(extensions, compiler_directives={"language_level": "3"}))
