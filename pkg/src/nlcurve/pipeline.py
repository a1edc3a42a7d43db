"""End-to-end evaluation of the nonlocal curvature of polylines and smooth curves.

The procedure is:

1. if z lies on the curve, cut out the disk of radius rho around z;
2. split the rest into radial layers around z;
3. split every layer at the line through z orthogonal to u;
4. split every half-plane part into connected pieces;
5. (smooth input only) replace each curve by its linear interpolating spline
   beforehand;
6. add up the closed-form segment values with the alternating layer signs.
"""

from dataclasses import dataclass, field
import math
import warnings as _warnings

import numpy as np

from .decompose import ON_CURVE_TOL, decompose_with_diagnostics, distance_to_curve
from .errors import (
    DegenerateRayError,
    DomainError,
    GeometryError,
    InvalidNormalError,
    NlcurveError,
    ZOnCurveError,
)
from .geometry import CurveSet, Frame, Polyline, split_runs
from .segment import kappa_segments
from .special import _check_sigma
from .spline import ParametricCurve, interpolate

DEFAULT_RHO_FRACTION = 0.05
NORMAL_TOL = 1e-9
SMOOTH_NORMAL_TOL = 1e-6
MIN_PIECE = 1e-12
RETRY_ROTATION = 1e-10


class DegeneracyError(NlcurveError):
    """Decomposition failed again after rotating the frame slightly."""


@dataclass(frozen=True)
class PipelineOptions:
    rho: float = None
    spline_n: int = 256
    diagnostics: bool = False
    seed: int = 0

    def __post_init__(self):
        if self.rho is not None and not self.rho > 0:
            raise DomainError(f"rho must be positive, got {self.rho}")
        if int(self.spline_n) < 2:
            raise DomainError(f"spline_n must be at least 2, got {self.spline_n}")


@dataclass(frozen=True)
class PieceContribution:
    sign: int
    piece_id: int
    layer: int
    side: int
    contribution: float
    n_segments: int


@dataclass
class KappaReport:
    value: float
    per_piece: list = field(default_factory=list)
    removed_disk: float = None
    warnings: list = field(default_factory=list)
    spline_n: int = None
    diagnostics: list = field(default_factory=list)

    def signed_sum(self):
        return math.fsum(p.sign * p.contribution for p in self.per_piece)


def _as_curveset(curve):
    if isinstance(curve, CurveSet):
        return curve
    if isinstance(curve, Polyline):
        return CurveSet([curve], validate=False)
    return CurveSet(curve)


def _containing_segments(curve, z, tol):
    A, B, _ = curve.segment_arrays()
    D = B - A
    ll = np.einsum("ij,ij->i", D, D)
    t = np.clip(np.einsum("ij,ij->i", z - A, D) / ll, 0.0, 1.0)
    dist = np.hypot(*(z - (A + t[:, None] * D)).T)
    idx = np.flatnonzero(dist <= tol)
    return idx, D[idx] / np.sqrt(ll[idx])[:, None]


def check_normal(curve, frame, tol=NORMAL_TOL):
    """Raise InvalidNormalError unless u is normal to the curve at z.

    At an interior point of a segment the tangent is the segment direction;
    at a vertex it is the normalised sum of the two adjacent directions.
    """
    idx, dirs = _containing_segments(curve, frame.z, ON_CURVE_TOL)
    if len(idx) == 0:
        return
    if len(idx) == 1:
        tangent = dirs[0]
    else:
        tangent = dirs[0] + dirs[1]
        n = math.hypot(*tangent)
        tangent = dirs[0] if n < 1e-12 else tangent / n
    if abs(float(tangent @ frame.u)) > tol:
        raise InvalidNormalError(
            f"z lies on the curve but u is not normal there (|u.t| = {abs(float(tangent @ frame.u)):.3g})"
        )


def remove_disk(curve, z, rho):
    """Curve minus the open disk of radius rho around z.

    Segments are cut at their exact intersections with the circle; pieces
    shorter than ``MIN_PIECE`` are dropped.
    """
    z = np.asarray(z, dtype=float)
    out = []
    for poly in curve.components:
        A = poly.starts - z
        D = poly.ends - poly.starts
        a = np.einsum("ij,ij->i", D, D)
        b = np.einsum("ij,ij->i", A, D)
        c = np.einsum("ij,ij->i", A, A) - rho * rho
        disc = b * b - a * c
        sq = np.sqrt(np.maximum(disc, 0.0))
        # stable roots of a t^2 + 2 b t + c
        q = -(b + np.copysign(sq, b))
        with np.errstate(divide="ignore", invalid="ignore"):
            r1 = np.where(q != 0, q / a, 0.0)
            r2 = np.where(q != 0, c / q, 0.0)
        t1 = np.minimum(r1, r2)
        t2 = np.maximum(r1, r2)
        hit = disc > 0
        cut1 = hit & (t1 > 0) & (t1 < 1)
        cut2 = hit & (t2 > 0) & (t2 < 1)
        m = poly.n_segments
        cuts = np.full((m, 4), np.nan)
        cuts[:, 0] = 0.0
        cuts[:, 1] = np.where(cut1, t1, np.nan)
        cuts[:, 2] = np.where(cut2, t2, np.nan)
        cuts[:, 3] = 1.0
        cnt = 1 + cut1.astype(int) + cut2.astype(int)
        seg = np.repeat(np.arange(m), cnt)
        flat = cuts[~np.isnan(cuts)]
        bounds_per = cnt + 1
        starts_idx = np.cumsum(bounds_per) - bounds_per
        pos = np.arange(len(seg)) - np.repeat(np.cumsum(cnt) - cnt, cnt)
        t0 = flat[starts_idx[seg] + pos]
        t1_ = flat[starts_idx[seg] + pos + 1]
        mid = A[seg] + (0.5 * (t0 + t1_))[:, None] * D[seg]
        outside = np.einsum("ij,ij->i", mid, mid) > rho * rho
        long_enough = (t1_ - t0) * np.sqrt(a[seg]) >= MIN_PIECE
        labels = (outside & long_enough).astype(int)
        for _, piece in split_runs(poly, seg, t0, t1_, labels):
            if piece.length >= MIN_PIECE:
                out.append(piece)
    return CurveSet(out, validate=False)


def _evaluate(curve, frame, sigma):
    pieces, diagnostics = decompose_with_diagnostics(curve, frame)
    if not pieces:
        return 0.0, [], diagnostics
    starts = np.concatenate([p.piece.starts for p in pieces])
    ends = np.concatenate([p.piece.ends for p in pieces])
    vals = kappa_segments(starts, ends, frame, sigma)
    counts = np.array([p.piece.n_segments for p in pieces])
    offsets = np.concatenate([[0], np.cumsum(counts)[:-1]])
    contrib = np.add.reduceat(vals, offsets)
    per_piece = [
        PieceContribution(p.sign, i, p.layer, p.side, float(v), int(n))
        for i, (p, v, n) in enumerate(zip(pieces, contrib, counts))
    ]
    value = math.fsum(pc.sign * pc.contribution for pc in per_piece)
    return value, per_piece, diagnostics


def default_rho(curve, z):
    A, B, _ = curve.segment_arrays()
    V = np.concatenate([A, B]) - np.asarray(z, dtype=float)
    return DEFAULT_RHO_FRACTION * float(np.max(np.hypot(*V.T)))


def kappa_polyline(curve, frame, sigma, opts=None, on_curve=None, normal_tol=NORMAL_TOL):
    """Nonlocal curvature of a union of polylines.

    Parameters
    ----------
    curve : CurveSet or Polyline
    frame : Frame
    sigma : float
        Order in (0, 1).
    opts : PipelineOptions, optional
    on_curve : bool, optional
        Force (True) or suppress (False) the disk removal instead of testing
        whether z lies on the curve.
    normal_tol : float or None
        Tolerance for u being normal at z; None skips the check.

    Returns
    -------
    KappaReport

    Raises
    ------
    InvalidNormalError
        If z lies on the curve and u is not normal there.
    DegeneracyError
        If the decomposition fails even after a tiny random frame rotation.
    """
    _check_sigma(sigma)
    opts = opts or PipelineOptions()
    curve = _as_curveset(curve)
    report = KappaReport(0.0, spline_n=None)
    if curve.is_empty():
        return report
    if on_curve is None:
        on_curve = distance_to_curve(curve, frame.z) <= ON_CURVE_TOL
    work = curve
    if on_curve:
        if normal_tol is not None:
            check_normal(curve, frame, normal_tol)
        rho = opts.rho if opts.rho is not None else default_rho(curve, frame.z)
        work = remove_disk(curve, frame.z, rho)
        report.removed_disk = rho
        if work.is_empty():
            report.warnings.append("the disk around z covers the whole curve")
            return report
    try:
        value, per_piece, diag = _evaluate(work, frame, sigma)
    except (ZOnCurveError, DegenerateRayError, GeometryError) as exc:
        rng = np.random.default_rng(opts.seed)
        angle = RETRY_ROTATION * rng.choice([-1.0, 1.0])
        c, s = math.cos(angle), math.sin(angle)
        u = np.array([c * frame.u[0] - s * frame.u[1], s * frame.u[0] + c * frame.u[1]])
        report.warnings.append(f"retried with u rotated by {angle:.1e} rad after: {exc}")
        try:
            value, per_piece, diag = _evaluate(work, Frame.make(frame.z, u), sigma)
        except (ZOnCurveError, DegenerateRayError, GeometryError) as exc2:
            raise DegeneracyError(str(exc2)) from exc2
    report.value = value
    report.per_piece = per_piece
    report.diagnostics = diag
    if opts.diagnostics:
        report.warnings.extend(diag)
    return report


def _parameter_of(curve, z, samples=4096):
    t = np.linspace(curve.alpha, curve.beta, samples + 1)
    d = np.hypot(*(curve.eval(t) - z).T)
    i = int(np.argmin(d))
    lo, hi = t[max(i - 1, 0)], t[min(i + 1, len(t) - 1)]
    for _ in range(200):
        m1 = lo + (hi - lo) / 3.0
        m2 = hi - (hi - lo) / 3.0
        if np.hypot(*(curve.eval([m1])[0] - z)) < np.hypot(*(curve.eval([m2])[0] - z)):
            hi = m2
        else:
            lo = m1
    tz = 0.5 * (lo + hi)
    return tz, float(np.hypot(*(curve.eval([tz])[0] - z)))


def smooth_tangent(curve, t):
    h = 1e-5 * (curve.beta - curve.alpha)
    lo, hi = max(t - h, curve.alpha), min(t + h, curve.beta)
    if curve.closed:
        lo, hi = t - h, t + h
    d = curve.eval([hi])[0] - curve.eval([lo])[0]
    return d / math.hypot(*d)


def kappa_parametric(curves, frame, sigma, opts=None, extra=()):
    """Nonlocal curvature of smooth curves through their linear splines.

    Each curve is interpolated with ``opts.spline_n`` segments.  If z lies
    on one of the smooth curves, u must be normal to it there, and the disk
    of radius rho around z is removed from the spline union.  Polylines in
    ``extra`` are added to the union unchanged.

    Returns
    -------
    KappaReport
        ``spline_n`` is recorded for convergence sweeps.
    """
    _check_sigma(sigma)
    opts = opts or PipelineOptions()
    if isinstance(curves, ParametricCurve):
        curves = [curves]
    warn = []
    holder = min((c.holder for c in curves), default=1.0)
    if curves and sigma >= holder:
        msg = f"sigma = {sigma} is not below the Hoelder exponent {holder}; convergence is not guaranteed"
        warn.append(msg)
        _warnings.warn(msg, RuntimeWarning, stacklevel=2)
    polys = []
    for c in curves:
        try:
            polys.append(interpolate(c, opts.spline_n).polyline)
        except GeometryError as exc:
            raise GeometryError(
                f"spline of {c.name} with n = {opts.spline_n} is not simple ({exc}); try a larger n"
            ) from exc
    polys.extend(extra)
    try:
        union = CurveSet(polys)
    except GeometryError as exc:
        raise GeometryError(f"splines intersect each other ({exc}); try a larger n") from exc

    on_curve = False
    for c in curves:
        tz, dist = _parameter_of(c, frame.z)
        if dist <= ON_CURVE_TOL:
            on_curve = True
            tangent = smooth_tangent(c, tz)
            if abs(float(tangent @ frame.u)) > SMOOTH_NORMAL_TOL:
                raise InvalidNormalError(
                    f"z lies on {c.name} but u is not normal there (|u.t| = {abs(float(tangent @ frame.u)):.3g})"
                )
    if not on_curve and extra:
        on_curve = distance_to_curve(CurveSet(list(extra), validate=False), frame.z) <= ON_CURVE_TOL
        if on_curve:
            check_normal(CurveSet(list(extra), validate=False), frame)
    report = kappa_polyline(union, frame, sigma, opts, on_curve=on_curve, normal_tol=None)
    report.spline_n = int(opts.spline_n)
    report.warnings = warn + report.warnings
    return report
