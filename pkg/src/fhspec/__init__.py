"""Spectral laboratory for Toeplitz matrices with a Fisher-Hartwig symbol.

The symbol has a zero of order 2*alpha and a jump of size beta at z = 1::

    a(z) = (2 - z - 1/z)**alpha * (-z)**beta

Submodules follow the pipeline: ``symbol`` (analytic formulas), ``toeplitz``
(matrix construction and closed-form trace/determinant), ``spectral``
(eigenpairs, condition numbers, trajectory tracking), ``perturbation`` and
``rank1`` (non-Hermitian perturbation theory), ``disorder`` (sigma sweeps and
runaway classification), ``freeprob`` (free/classical density-of-states
approximations) and ``localization`` (entropy / IPR diagnostics).
"""

from fhspec.errors import (
    ConvergenceError,
    DegeneracyError,
    DomainError,
    FHSpecError,
    GridTooCoarseError,
    IllPosedBasisError,
    SingularPointError,
)
from fhspec.symbol import SymbolParams

__version__ = "0.1.0"

WORKING_PARAMS = SymbolParams(alpha=1.0 / 3.0, beta=-0.5)

__all__ = [
    "ConvergenceError",
    "DegeneracyError",
    "DomainError",
    "FHSpecError",
    "GridTooCoarseError",
    "IllPosedBasisError",
    "SingularPointError",
    "SymbolParams",
    "WORKING_PARAMS",
    "__version__",
]
