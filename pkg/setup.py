"""Build script: compiles the optional Cython fast path.

The package works without the extension (a numpy fallback is selected at
import time), so compilation failures are downgraded to a warning.
"""

import warnings

from setuptools import Extension, setup


def _extensions():
    try:
        from Cython.Build import cythonize
    except ImportError:
        warnings.warn("Cython not available; building pure-Python greenfilter")
        return []
    ext = Extension(
        "greenfilter._ensemble_cy",
        ["src/greenfilter/_ensemble_cy.pyx"],
    )
    return cythonize([ext], language_level=3)


setup(ext_modules=_extensions())
