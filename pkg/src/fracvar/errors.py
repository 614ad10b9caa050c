"""Exception hierarchy shared by every fracvar module."""

from __future__ import annotations


class FracvarError(Exception):
    """Base class for all library errors."""


class ParseError(FracvarError):
    """Syntax or name error in a Lagrangian expression."""

    def __init__(self, message: str, offset: int, expected=(), source: str = ""):
        self.offset = offset
        self.expected = tuple(sorted(set(expected)))
        self.source = source
        detail = f"{message} at offset {offset}"
        if self.expected:
            detail += f" (expected one of: {', '.join(self.expected)})"
        super().__init__(detail)


class LagrangianDomainError(FracvarError):
    """Expression evaluated outside its domain (ln of a negative, 1/0, ...)."""

    def __init__(self, message: str, offset: int, point_index: int | None = None):
        self.offset = offset
        self.point_index = point_index
        super().__init__(message)


class NonSmoothError(FracvarError):
    """A derivative was requested where the Lagrangian is not differentiable."""


class DivergedEvaluation(FracvarError):
    """A weakly singular integral is infinite at the requested point."""


class InadmissibleEpsilon(FracvarError):
    """Special-variation parameter too large for the |k(eps)| bound."""

    def __init__(self, message: str, threshold: float | None = None):
        self.threshold = threshold
        super().__init__(message)


class EndpointResidualError(FracvarError):
    """A constructed variation misses h(t1) = 0 by more than the tolerance."""


class RegimeMismatch(FracvarError):
    """Orders outside the range where a closed form or fixture applies."""


class BracketError(FracvarError):
    """No sign change of the isoperimetric residual inside the scanned range."""

    def __init__(self, message: str, bracket: tuple[float, float], values: tuple[float, float]):
        self.bracket = bracket
        self.values = values
        super().__init__(message)
