"""Numerical radii of complex matrices and Orlicz-function bounds on them.

Modules
-------
linalg     dense complex matrix helpers, |T|, spectral functions, matrix files
numrad     numerical radius with certified error, sampling oracle, range boundary
orlicz     Orlicz functions, axioms, sub-multiplicativity, inversion
bounds     the inequality catalogue and its evaluation
ensembles  seeded random-matrix families
harness    verification suites and reports
cli        the ``orlicz-radius`` command
"""

__version__ = "0.1.0"

from .linalg import abs_op, hermitian_eig, operator_norm, psd_fun
from .numrad import numerical_radius, radius_oracle, range_boundary, rotation_support

__all__ = [
    "__version__",
    "abs_op",
    "hermitian_eig",
    "operator_norm",
    "psd_fun",
    "numerical_radius",
    "radius_oracle",
    "range_boundary",
    "rotation_support",
]
