"""Exception types shared across modules."""


class AmoebaError(Exception):
    """Base class for library errors."""


class InputError(AmoebaError, ValueError):
    """Malformed user input (maps to CLI exit code 2)."""


class NonConvexInput(InputError):
    pass


class NonIntegralInput(InputError):
    pass


class DegeneratePolygon(InputError):
    pass


class NonGenericWeight(AmoebaError):
    """A lower-hull facet of the lifted points is not a triangle."""

    def __init__(self, message, facet=None):
        super().__init__(message)
        self.facet = facet


class NotACell(InputError):
    pass


class InvariantViolation(AmoebaError):
    """Raised when a checked invariant fails (CLI exit code 1)."""

    def __init__(self, message, witness=None):
        super().__init__(message)
        self.witness = witness or {}


class LemmaViolation(InvariantViolation):
    """The active set of a torus point is not a simplex of the subdivision."""


class BoundViolation(InvariantViolation):
    pass


class RegionMismatch(InputError):
    pass


class RootFindFailure(AmoebaError):
    pass


class DegenerateSlice(AmoebaError):
    pass


class ResolutionTooCoarse(InvariantViolation):
    pass


class InversionFailure(AmoebaError):
    pass
