"""Learning with positively decomposable kernels on non-Euclidean spaces.

Subpackages:

- ``geometry``: points, metrics, conversions, sampling and labeling on the
  hyperbolic plane, spheres, tori and SPD matrices
- ``kernels``: symbolic kernel expressions, Gram matrices, kernel algebra
- ``krein_linalg``: symmetric eigendecomposition, inertia, finite positive
  decompositions, shifted solves
- ``learners``: Krein kernel ridge regression and the Krein SVM
- ``harmonic``: cosine/Legendre expansion certificates of positive
  decomposability
- ``cli``: the ``krein`` command-line harness
"""

from . import geometry, harmonic, kernels, krein_linalg, learners
from .exceptions import (
    ConfigError,
    ConvergenceError,
    DimensionError,
    DomainError,
    InvalidPointError,
    KreinError,
    ParameterError,
    SingularShiftError,
    SpaceMismatchError,
)

__version__ = "0.1.0"

__all__ = [
    "geometry",
    "harmonic",
    "kernels",
    "krein_linalg",
    "learners",
    "KreinError",
    "ConfigError",
    "ConvergenceError",
    "DimensionError",
    "DomainError",
    "InvalidPointError",
    "ParameterError",
    "SingularShiftError",
    "SpaceMismatchError",
    "__version__",
]
