"""
Error hierarchy for orientation, channel and mobility computations.

Every domain error derives from ValueError so callers that only care about
"bad input" can keep catching ValueError.
"""
from typing import Optional


class OrientationModelError(ValueError):
    """Base class for all domain errors raised by this package."""


class DegeneratePose(OrientationModelError):
    pass


class EmptySeries(OrientationModelError):
    pass


class DegenerateVariance(OrientationModelError):
    pass


class DegenerateGeometry(OrientationModelError):
    pass


class OutOfSupport(OrientationModelError):
    pass


class DegenerateScale(OrientationModelError):
    """Approximate cos-psi scale is zero; the law is a point mass."""

    def __init__(self, message: str, point_mass: Optional[float] = None):
        super().__init__(message)
        self.point_mass = point_mass


class ConditionUnmet(OrientationModelError):
    pass


class InvalidTiming(OrientationModelError):
    pass


class InvalidConfig(OrientationModelError):
    pass


class UnsupportedFamily(OrientationModelError):
    pass


class NonMonotonicTimestamps(OrientationModelError):
    pass


class ParseError(OrientationModelError):
    """Config or dataset could not be parsed. Carries the offending line/field."""

    def __init__(self, message: str, line: Optional[int] = None, field: Optional[str] = None):
        location = []
        if line is not None:
            location.append(f"line {line}")
        if field is not None:
            location.append(f"field '{field}'")
        if location:
            message = f"{message} ({', '.join(location)})"
        super().__init__(message)
        self.line = line
        self.field = field


class ValidationError(OrientationModelError):
    """A parsed value violates an invariant; `invariant` names which one."""

    def __init__(self, message: str, invariant: str):
        super().__init__(f"{message} [violates: {invariant}]")
        self.invariant = invariant
