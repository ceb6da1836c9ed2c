"""Error hierarchy for dclab."""


class DclabError(Exception):
    """Base class for every error raised by the library."""


class InvariantViolation(DclabError):
    """A value type was constructed with data breaking one of its invariants."""


class SingularInput(DclabError):
    """Input lies on a singular locus (y = 1/2, a puncture, or a critical value)."""


class DomainError(DclabError):
    """Energy level outside the period annulus or branch domain of an operation."""


class PoleOnPath(DclabError):
    """A pole of the integrand lies on, or too close to, the integration path."""


class ConnectorError(DclabError):
    """A loop connector would pass too close to a puncture."""


class ConvergenceError(DclabError):
    """Quadrature or ODE integration failed to reach the requested accuracy."""


class EscapeError(ConvergenceError):
    """An orbit left the escape ball."""


class OpenOrbitError(ConvergenceError):
    """An orbit did not return to its section within the time limit."""


class EndpointZeroError(DclabError):
    """The function vanishes at an endpoint of a zero-counting interval."""


class InvariantLineError(DclabError):
    """The point is too close to the invariant line of the Darboux integral."""


class ArcParseError(DclabError):
    """An arc string could not be parsed."""


class ZeroArcError(DclabError):
    """The arc is identically zero."""


class ClassificationMismatch(DclabError):
    """Order case analysis and component equations disagree on an arc."""
