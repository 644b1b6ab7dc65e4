import os

from setuptools import Extension, setup

ext_modules = []
if os.environ.get("SPLINEWAVE_NO_EXT") != "1":
    try:
        from Cython.Build import cythonize
    except ImportError:
        cythonize = None
    if cythonize is not None:
        ext_modules = cythonize(
            [Extension("splinewave._ckernels", ["src/splinewave/_ckernels.pyx"])],
            language_level="3",
        )

setup(ext_modules=ext_modules)
