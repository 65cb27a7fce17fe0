"""Exception hierarchy shared by every module of the laboratory."""


class SonineError(Exception):
    """Base class for all domain errors raised by the package."""


class InvalidParameterError(SonineError, ValueError):
    """A parameter violates a documented precondition."""


class PoleError(SonineError, ValueError):
    """Evaluation requested at (or within the pole threshold of) a pole."""


class GridMismatchError(SonineError, ValueError):
    """Two grid functions live on different grids."""


class DomainError(SonineError, ValueError):
    """An evaluation route was asked for outside its region of validity."""


class ConvergenceError(SonineError, ArithmeticError):
    """A series or quadrature failed to reach its accuracy target."""


class CrossCheckError(SonineError, ArithmeticError):
    """Two independent evaluation routes disagree beyond tolerance."""


class RadiusCollisionError(SonineError, ValueError):
    """A known pole lies inside a Cauchy integration circle."""


class EmptyFrameError(SonineError, ArithmeticError):
    """A nullspace computation admitted no vector under the threshold.

    The smallest singular value is kept for diagnostics.
    """

    def __init__(self, message: str, smallest_singular_value: float):
        super().__init__(f"{message} (smallest singular value {smallest_singular_value:.3e})")
        self.smallest_singular_value = smallest_singular_value


class EigenvalueDriftError(SonineError, ArithmeticError):
    """A compressed involution has an eigenvalue too far from +1 or -1."""


class DimensionError(SonineError, ValueError):
    """Subspace dimensions are incompatible with the requested operation."""


class DegenerateVectorError(SonineError, ArithmeticError):
    """A vector that must be normalised has (numerically) zero norm."""


class MissingArtifactError(SonineError, FileNotFoundError):
    """An expected output file is absent."""
