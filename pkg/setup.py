from setuptools import setup, Extension

try:
    from Cython.Build import cythonize
except ImportError:  # no Cython: install the pure-Python kernels only
    ext_modules = []
else:
    ext_modules = cythonize([Extension("jscc_exponents._core", ["src/jscc_exponents/_core.pyx"])],
                            language_level=3)

setup(ext_modules=ext_modules)
