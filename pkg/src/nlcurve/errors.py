"""Exception hierarchy shared by every nlcurve module."""


class NlcurveError(Exception):
    """Base class for all library errors."""


class DomainError(NlcurveError, ValueError):
    """An argument lies outside the domain of a mathematical function."""


class GeometryError(NlcurveError, ValueError):
    """A curve failed ingestion checks (self-intersection, overlap, ...)."""


class DegenerateCurveError(GeometryError):
    """All samples of a parametric curve coincide."""


class DegenerateRayError(NlcurveError):
    """A cast ray is collinear with a positive-length part of the curve or
    passes through a vertex where the crossing count is ambiguous."""


class OnExtensionError(NlcurveError):
    """The evaluation point lies on the infinite extension of a segment."""


class ZOnCurveError(NlcurveError):
    """The evaluation point lies on the curve where that is not allowed."""


class InvalidNormalError(NlcurveError, ValueError):
    """The evaluation point is on the curve but u is not normal there."""


class NotRadialError(NlcurveError):
    """A piece meets some ray from the evaluation point more than once."""


class PVMismatchError(NlcurveError):
    """Divergent head terms of antipodal rays failed to cancel."""


class UnknownCurveError(NlcurveError, ValueError):
    """A catalog name is not recognised."""


class InvalidParamsError(NlcurveError, ValueError):
    """Catalog parameters have the wrong count or invalid values."""
