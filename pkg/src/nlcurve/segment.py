"""Closed-form nonlocal curvature of a single line segment.

For a segment in the closed upper half-plane of the frame (z at the origin,
u = +y) whose supporting line misses the origin,

    kappa = sec(th_m - th_p)**sigma / (sigma * r_m**sigma)
            * (Psi(sin(th_2 - th_p)) - Psi(sin(th_1 - th_p)))

where th_1 <= th_2 are the endpoint angles, (r_m, th_m) is the midpoint in
polar form and th_p is the angle of the foot of the perpendicular from the
origin to the supporting line.  Segments in the lower half-plane are handled
through kappa(C, -u) = -kappa(C, u).
"""

from dataclasses import dataclass
import math

import numpy as np

from .errors import DomainError, OnExtensionError
from .geometry import EPS, Frame, Segment, cross
from .special import _check_sigma, psi_sigma, psi_sigma_array

# below this distance-to-length ratio the supporting line counts as passing through z
NEAR_EXTENSION = 1e-9


def _angle(x, y):
    """atan2 mapped into [-pi/2, 3pi/2); -0.0 in y is treated like +0.0."""
    a = math.atan2(y, x)
    if a < -0.5 * math.pi:
        a += 2.0 * math.pi
    return a


@dataclass(frozen=True)
class SegmentPolar:
    """Polar description of a segment in frame coordinates."""

    theta1: float
    theta2: float
    r_m: float
    theta_m: float
    theta_perp: float
    r1: float
    r2: float


def _local(seg):
    if isinstance(seg, Segment):
        return np.array(seg.a), np.array(seg.b)
    a, b = seg
    return np.asarray(a, dtype=float), np.asarray(b, dtype=float)


def _foot(a, b):
    d = b - a
    d = d / math.hypot(*d)
    return a - (a @ d) * d


def _on_extension(a, b):
    length = math.hypot(*(b - a))
    dist = abs(cross(b - a, -a)) / length
    return dist < NEAR_EXTENSION * length


def perp_angle(seg):
    """Angle of the foot of the perpendicular from the origin to the segment's line.

    Parameters
    ----------
    seg : Segment or pair of points
        Segment in frame coordinates.

    Returns
    -------
    float
        Angle in (-pi/2, 3pi/2).

    Raises
    ------
    OnExtensionError
        If the origin lies on the supporting line.
    """
    a, b = _local(seg)
    if _on_extension(a, b):
        raise OnExtensionError("origin lies on the segment's supporting line")
    f = _foot(a, b)
    return _angle(f[0], f[1])


def segment_polar(seg):
    """Endpoint angles, midpoint polar coordinates and perpendicular angle."""
    a, b = _local(seg)
    tp = perp_angle((a, b))
    ta = _angle(a[0], a[1])
    tb = _angle(b[0], b[1])
    m = 0.5 * (a + b)
    r1, r2 = math.hypot(*a), math.hypot(*b)
    if ta > tb:
        ta, tb = tb, ta
        r1, r2 = r2, r1
    return SegmentPolar(ta, tb, math.hypot(*m), _angle(m[0], m[1]), tp, r1, r2)


def kappa_halfplane_segment(seg, sigma):
    """Nonlocal curvature of a segment lying in the closed upper half-plane.

    The frame is implicit: the segment is given in frame coordinates.
    Evaluates sec^sigma(theta_m - theta_perp) / (sigma r_m^sigma) times the
    difference of Psi_sigma at sin(theta_i - theta_perp).  The angle
    differences are formed from dot and cross products with the unit normal
    rather than by subtracting angles, which keeps full precision when the
    segment is short or far away.  Returns 0 when the supporting line passes
    through the origin.
    """
    _check_sigma(sigma)
    a, b = _local(seg)
    scale = max(math.hypot(*a), math.hypot(*b))
    if min(a[1], b[1]) < -EPS * scale:
        raise DomainError("segment must lie in the closed upper half-plane")
    if _on_extension(a, b):
        return 0.0
    return float(_halfplane_batch(a[None], b[None], sigma)[0])


def kappa_segment(seg, frame, sigma):
    """Nonlocal curvature of one segment relative to an arbitrary frame.

    Parameters
    ----------
    seg : Segment or pair of points
        Segment in world coordinates.
    frame : Frame
    sigma : float
        Order in (0, 1).

    Notes
    -----
    The part below the line through z orthogonal to u is reflected through
    the origin and enters with a minus sign.
    """
    _check_sigma(sigma)
    a, b = _local(seg)
    return float(kappa_segments_local(frame.to_local(a)[None], frame.to_local(b)[None], sigma)[0])


def _halfplane_batch(A, B, sigma):
    """Vectorised upper-half-plane formula for segments A->B in frame coordinates."""
    D = B - A
    length = np.hypot(D[:, 0], D[:, 1])
    c = cross(D, -A)
    dist = np.abs(c) / length
    live = dist >= NEAR_EXTENSION * length
    out = np.zeros(len(A))
    if not np.any(live):
        return out
    A, B, D, dist, length = A[live], B[live], D[live], dist[live], length[live]
    Dh = D / length[:, None]
    # n points from the origin to the foot of the perpendicular (angle theta_perp)
    n = np.column_stack([Dh[:, 1], -Dh[:, 0]])
    n *= np.sign(np.einsum("ij,ij->i", n, A))[:, None]
    M = 0.5 * (A + B)
    r_m = np.hypot(M[:, 0], M[:, 1])
    cos_m = np.einsum("ij,ij->i", n, M) / r_m  # cos(theta_m - theta_perp)
    ra = np.hypot(A[:, 0], A[:, 1])
    rb = np.hypot(B[:, 0], B[:, 1])
    sa = np.clip(cross(n, A) / ra, -1.0, 1.0)  # sin(theta - theta_perp)
    sb = np.clip(cross(n, B) / rb, -1.0, 1.0)
    diff = np.abs(psi_sigma_array(sb, sigma) - psi_sigma_array(sa, sigma))
    out[live] = (cos_m * r_m) ** (-sigma) / sigma * diff
    return out


def kappa_segments_local(A, B, sigma):
    """Per-segment nonlocal curvature for arrays of segments in frame coordinates.

    Segments crossing the line y = 0 are split there; lower parts enter with
    a minus sign.  Segments whose supporting line passes within
    ``NEAR_EXTENSION`` times their length of the origin contribute exactly 0.
    """
    _check_sigma(sigma)
    A = np.asarray(A, dtype=float).reshape(-1, 2)
    B = np.asarray(B, dtype=float).reshape(-1, 2)
    m = len(A)
    out = np.zeros(m)
    if m == 0:
        return out
    D = B - A
    length = np.hypot(D[:, 0], D[:, 1])
    degenerate = np.abs(cross(D, -A)) < NEAR_EXTENSION * length * length

    ya, yb = A[:, 1], B[:, 1]
    split = (ya * yb < 0.0) & ~degenerate
    whole = ~split & ~degenerate
    upper = whole & (ya + yb >= 0.0)
    lower = whole & ~upper
    out[upper] = _halfplane_batch(A[upper], B[upper], sigma)
    out[lower] = -_halfplane_batch(-A[lower], -B[lower], sigma)
    if np.any(split):
        As, Bs = A[split], B[split]
        t = As[:, 1] / (As[:, 1] - Bs[:, 1])
        C = As + t[:, None] * (Bs - As)
        C[:, 1] = 0.0
        a_up = As[:, 1] > 0
        U0 = np.where(a_up[:, None], As, Bs)
        L0 = np.where(a_up[:, None], Bs, As)
        vu = np.zeros(len(As))
        vl = np.zeros(len(As))
        tiny = EPS * length[split]
        ok_u = np.hypot(*(U0 - C).T) > tiny
        ok_l = np.hypot(*(L0 - C).T) > tiny
        vu[ok_u] = _halfplane_batch(U0[ok_u], C[ok_u], sigma)
        vl[ok_l] = _halfplane_batch(-L0[ok_l], -C[ok_l], sigma)
        out[split] = vu - vl
    return out


def kappa_segments(A, B, frame, sigma):
    """Per-segment values for world-coordinate segment arrays."""
    return kappa_segments_local(frame.to_local(A), frame.to_local(B), sigma)


def kappa_polyline_exact(curve, frame, sigma):
    """Sum of segment contributions; exact for radial curves in one half-plane."""
    A, B, _ = curve.segment_arrays()
    return float(np.sum(kappa_segments(A, B, frame, sigma)))


__all__ = [
    "Frame",
    "SegmentPolar",
    "perp_angle",
    "segment_polar",
    "kappa_halfplane_segment",
    "kappa_segment",
    "kappa_segments",
    "kappa_segments_local",
]
