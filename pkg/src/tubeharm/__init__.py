"""Harmonic analysis on tube domains over polyhedral cones.

Subpackages by concern: cone geometry, periodic grid transforms,
iterated Poisson operators, holomorphic spectral test functions,
multi-parameter maximal/square operators, the 1-d Hilbert-space-valued
reconstruction machinery, and the verification harness.
"""

__version__ = "0.1.0"

from . import cone, grid, poisson, spectral, operators, wavelet, harness  # noqa: F401
