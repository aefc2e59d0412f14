"""Exception types shared across the library.

Every error carries enough context to reconstruct the offending input;
none of them is ever used for control flow on valid data.
"""

from __future__ import annotations


class RadoLabError(Exception):
    """Base class for all library errors."""


class DimensionMismatch(RadoLabError):
    pass


class DuplicatePoint(RadoLabError):
    pass


class NotSymmetric(RadoLabError):
    """A vertex without its negation in a would-be unit ball."""


class DegenerateSpan(RadoLabError):
    """Vertices lie in a proper subspace, so the gauge is not a norm."""


class NotOnSphere(RadoLabError):
    """Extreme-point predicates require an argument of norm exactly 1."""


class NotUnitNorm(RadoLabError):
    pass


class OutOfDomain(RadoLabError):
    pass


class NotInjective(RadoLabError):
    """A finite map given as pairs repeats a domain or image point."""


class NotAffineBasis(RadoLabError):
    pass


class NotAnIsometry(RadoLabError):
    pass


class TooManyVertices(RadoLabError):
    """Brute-force isometry group enumeration guard tripped."""


class WindowTooSmall(RadoLabError):
    """Rejection sampling exceeded its retry budget."""


class IndexOutOfRange(RadoLabError):
    pass


class CrossCheckFailure(RadoLabError):
    """Two independent computations of the same object disagree.

    This always indicates an implementation bug, never bad input.
    """


class SingularMatrix(RadoLabError):
    pass


class BadRational(RadoLabError):
    """A config value was not an exact integer or p/q literal."""


class UnknownBuiltin(RadoLabError):
    pass


class UnknownSubcommand(RadoLabError):
    pass
