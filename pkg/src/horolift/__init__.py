"""Conformal factors on sphere domains and their lifts to hyperbolic space."""
from .errors import ConeExitError, DomainError, LiftDegeneracyError, NoSolutionFound, NormalizationError

__all__ = ["ConeExitError", "DomainError", "LiftDegeneracyError", "NoSolutionFound", "NormalizationError"]
__version__ = "0.1.0"
