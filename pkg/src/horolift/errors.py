"""Exception types raised by horolift."""


class DomainError(ValueError):
    """A point or parameter lies outside the domain an operation accepts."""


class LiftDegeneracyError(ValueError):
    """The lifted immersion is degenerate (some Schouten eigenvalue is near 1/2)."""


class NormalizationError(RuntimeError):
    """No dilation in the search schedule satisfied the lift conditions."""


class ConeExitError(RuntimeError):
    """The radial trajectory left the elliptic cone or the curvature bracket."""


class NoSolutionFound(RuntimeError):
    """Shooting found no sign change of the boundary residual."""
