"""Nonlocal curvature of planar curves.

Exact values for unions of line segments come from an incomplete-beta closed
form combined with an angular sweep decomposition; smooth curves go through
linear interpolating splines.  A ray-casting quadrature provides independent
reference values.
"""

from .decompose import decompose_full, radial_layers, split_components
from .errors import (
    DegenerateCurveError,
    DegenerateRayError,
    DomainError,
    GeometryError,
    InvalidNormalError,
    InvalidParamsError,
    NlcurveError,
    NotRadialError,
    OnExtensionError,
    PVMismatchError,
    UnknownCurveError,
    ZOnCurveError,
)
from .geometry import CurveSet, Frame, Polyline, Segment, crossing_parity, halfplane_clip, ray_hits, to_frame_coords
from .oracle import OracleOptions, kappa_oracle, kappa_radial_oracle, ray_profile
from .pipeline import KappaReport, PipelineOptions, kappa_parametric, kappa_polyline
from .segment import kappa_halfplane_segment, kappa_segment, perp_angle
from .special import incomplete_beta, integral_cos_pow, integral_sin_pow, psi_sigma
from .spline import ParametricCurve, catalog, interpolate

__version__ = "0.1.0"

__all__ = [
    "CurveSet",
    "DegenerateCurveError",
    "DegenerateRayError",
    "DomainError",
    "Frame",
    "GeometryError",
    "InvalidNormalError",
    "InvalidParamsError",
    "KappaReport",
    "NlcurveError",
    "NotRadialError",
    "OnExtensionError",
    "OracleOptions",
    "PVMismatchError",
    "ParametricCurve",
    "PipelineOptions",
    "Polyline",
    "Segment",
    "UnknownCurveError",
    "ZOnCurveError",
    "catalog",
    "crossing_parity",
    "decompose_full",
    "halfplane_clip",
    "incomplete_beta",
    "integral_cos_pow",
    "integral_sin_pow",
    "interpolate",
    "kappa_halfplane_segment",
    "kappa_oracle",
    "kappa_parametric",
    "kappa_polyline",
    "kappa_radial_oracle",
    "kappa_segment",
    "perp_angle",
    "psi_sigma",
    "radial_layers",
    "ray_hits",
    "ray_profile",
    "split_components",
    "to_frame_coords",
]
