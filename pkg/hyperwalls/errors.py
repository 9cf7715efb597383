"""
Exception hierarchy shared by all hyperwalls modules.
"""


class HyperwallsError(Exception):
    """Base class for every error raised by the package."""


class PreconditionError(HyperwallsError):
    """An operation was called on inputs outside its domain."""


class NotReflectiveError(PreconditionError):
    """Intersecting walls meet at an angle that is not pi/m."""

    def __init__(self, pairs):
        self.pairs = list(pairs)
        listed = ", ".join(f"{{{a},{b}}}" for a, b in self.pairs)
        super().__init__(f"not a reflective arrangement at this parameter: {listed}")


class DimensionMismatchError(PreconditionError):
    """Vectors of different length or of mixed scalar kinds."""


class SymmetryError(PreconditionError):
    """A matrix passed as a symmetry does not preserve the Minkowski form."""


class DegenerateFitError(HyperwallsError):
    """Sphere or plane fit through projected samples failed."""


class LiteralError(HyperwallsError, ValueError):
    """An exact literal or arrangement file could not be parsed."""
