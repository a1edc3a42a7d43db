"""Reference values of the nonlocal curvature by ray casting and angular quadrature.

Along the ray z + r e the sign function is piecewise constant in r and flips
at every crossing, so the radial integral of sign * r**(-1-sigma) is known in
closed form.  What remains is a one-dimensional integral over directions,
done with adaptive Gauss-Kronrod quadrature.  Each direction e is paired with
-e: their divergent head terms cancel, which realises the principal value at
points of the curve.

Directions are parametrised from the frame's x-axis in two quarters,
e = (cos p, sin p) and e = (-cos p, sin p) for p in [0, pi/2], so that rays
nearly tangent to the dividing line keep full relative precision.  When z lies
on the curve the first interval of each quarter is integrated in the variable
w = p**(1 - sigma), which removes the p**(-sigma) endpoint singularity.
"""

from dataclasses import dataclass, field
import math

import numpy as np

from .errors import DegenerateRayError, NotRadialError, PVMismatchError
from .geometry import EPS, CurveSet, Frame, Polyline, cross
from .quadrature import integrate
from .special import _check_sigma
from .spline import ParametricCurve

HALF_PI = 0.5 * math.pi
NUDGE = 1e-9
_CHUNK = 512


@dataclass(frozen=True)
class OracleOptions:
    theta_tolerance: float = 1e-10
    max_subdivisions: int = 20000
    perturbation_seed: int = 0
    rel_tolerance: float = 0.0

    def __post_init__(self):
        if not self.theta_tolerance > 0:
            raise ValueError("theta_tolerance must be positive")


@dataclass
class OracleResult:
    value: float
    error: float
    intervals: int
    converged: bool
    on_curve: bool
    max_head_mismatch: float = 0.0
    nudged_rays: int = 0


@dataclass(frozen=True)
class RayProfile:
    """Head coefficient (multiplies eps**-sigma / sigma) and finite remainder."""

    head: float
    regular: float


# ---------------------------------------------------------------------------
# radial integrals


def integrate_piecewise_constant(radii, values, sigma):
    """int_0^inf c(r) r**(-1-sigma) dr for a step function c.

    ``values[0]`` holds on (0, radii[0]), ``values[j]`` on (radii[j-1], radii[j])
    and ``values[-1]`` beyond the last radius.  The divergent contribution
    of the first step is returned separately as its coefficient.

    Returns
    -------
    RayProfile
    """
    r = np.asarray(radii, dtype=float)
    c = np.asarray(values, dtype=float)
    if len(c) != len(r) + 1:
        raise ValueError("need one more value than radii")
    if np.any(np.diff(r) < 0) or np.any(r <= 0):
        raise ValueError("radii must be positive and increasing")
    jumps = np.diff(c)
    return RayProfile(float(c[0]), float(np.sum(jumps * r ** (-sigma)) / sigma))


def _alternating(R, sigma, scale=None):
    """Sum over sorted hits of (-1)**(j+1) * (scale/r_j)**sigma, row by row."""
    if R.shape[1] == 0:
        return np.zeros(R.shape[0])
    R = np.sort(R, axis=1)
    sgn = np.where(np.arange(R.shape[1]) % 2 == 0, 1.0, -1.0)
    if scale is None:
        T = R ** (-sigma)
    else:
        T = (scale[:, None] / R) ** sigma
    T = np.where(np.isnan(R), 0.0, T)
    return T @ sgn


# ---------------------------------------------------------------------------
# ray casters, all in frame coordinates


class _Caster:
    on_curve = False

    def breakpoints(self):
        return np.zeros(0)

    def radii(self, E):
        """(K, H) hit radii with NaN padding and a (K,) degenerate-ray mask."""
        raise NotImplementedError


class PolylineCaster(_Caster):
    def __init__(self, curve, frame):
        A, B, _ = curve.segment_arrays()
        self.A = frame.to_local(A)
        self.B = frame.to_local(B)
        self.scale = float(max(np.abs(self.A).max(initial=0.0), np.abs(self.B).max(initial=0.0), 1e-300))
        if len(self.A):
            D = self.B - self.A
            ll = np.einsum("ij,ij->i", D, D)
            t = np.clip(-np.einsum("ij,ij->i", self.A, D) / ll, 0.0, 1.0)
            dist = np.hypot(*(self.A + t[:, None] * D).T)
            self.on_curve = bool(dist.min() <= 1e-9 * max(self.scale, 1.0))

    def breakpoints(self):
        V = np.concatenate([self.A, self.B])
        V = V[np.hypot(*V.T) > 1e-12 * self.scale]
        return np.arctan2(V[:, 1], V[:, 0])

    def radii(self, E):
        A, B = self.A, self.B
        K = len(E)
        if len(A) == 0:
            return np.zeros((K, 0)), np.zeros(K, dtype=bool)
        D = B - A
        la = np.hypot(*A.T)
        lb = np.hypot(*B.T)
        ex = E[:, 0:1]
        ey = E[:, 1:2]
        sa = ex * A[None, :, 1] - ey * A[None, :, 0]
        sb = ex * B[None, :, 1] - ey * B[None, :, 0]
        on_a = np.abs(sa) <= EPS * la[None, :]
        on_b = np.abs(sb) <= EPS * lb[None, :]
        front = (ex * A[None, :, 0] + ey * A[None, :, 1] > 0) | (ex * B[None, :, 0] + ey * B[None, :, 1] > 0)
        degenerate = np.any(on_a & on_b & front & (np.hypot(*D.T)[None, :] > 0), axis=1)
        pa = (sa > 0) & ~on_a
        pb = (sb > 0) & ~on_b
        denom = ex * D[None, :, 1] - ey * D[None, :, 0]
        with np.errstate(divide="ignore", invalid="ignore"):
            r = cross(A, D)[None, :] / denom
        good = (pa != pb) & (denom != 0) & (r > 1e-12 * self.scale)
        R = np.where(good, r, np.nan)
        return R, degenerate


class CircleCaster(_Caster):
    """Exact hits with a circle or circular arc."""

    def __init__(self, center, radius, frame, arc=None):
        self.R = float(radius)
        self.c = frame.to_local(np.asarray(center, dtype=float))
        self.cc = float(self.c @ self.c - self.R * self.R)
        self.on_curve_circle = abs(self.cc) <= 1e-12 * self.R * self.R
        # world angle = local angle + offset
        up = frame.u_perp
        self.offset = math.atan2(up[1], up[0])
        self.arc = arc
        self.on_curve = self.on_curve_circle and (arc is None or self._in_arc(np.array([-self.c[0]]), np.array([-self.c[1]]))[0])

    def _in_arc(self, qx, qy):
        if self.arc is None:
            return np.ones(len(qx), dtype=bool)
        t0, t1 = self.arc
        ang = np.arctan2(qy, qx) + self.offset
        return (ang - t0) % (2.0 * math.pi) <= (t1 - t0) + 1e-15

    def breakpoints(self):
        out = []
        d = math.hypot(*self.c)
        base = math.atan2(self.c[1], self.c[0])
        if d > self.R:
            half = math.asin(self.R / d)
            out += [base - half, base + half]
        if self.arc is not None:
            for t in self.arc:
                a = t - self.offset
                p = self.c + self.R * np.array([math.cos(a), math.sin(a)])
                if math.hypot(*p) > 1e-12 * self.R:
                    out.append(math.atan2(p[1], p[0]))
        return np.array(out)

    def radii(self, E):
        b = E @ self.c
        K = len(E)
        if self.on_curve_circle:
            r1 = 2.0 * b
            r2 = np.full(K, np.nan)
            # the other root is z itself and is known to be exactly 0
            r1 = np.where(r1 > 0, r1, np.nan)
        else:
            disc = b * b - self.cc
            ok = disc >= 0
            sq = np.sqrt(np.where(ok, disc, 0.0))
            q = b + np.copysign(sq, b)
            with np.errstate(divide="ignore", invalid="ignore"):
                r1 = np.where(ok, q, np.nan)
                r2 = np.where(ok & (q != 0), self.cc / q, np.nan)
            r1 = np.where(r1 > 0, r1, np.nan)
            r2 = np.where(r2 > 0, r2, np.nan)
        R = np.stack([r1, r2], axis=1)
        if self.arc is not None:
            for j in range(2):
                qx = R[:, j] * E[:, 0] - self.c[0]
                qy = R[:, j] * E[:, 1] - self.c[1]
                R[:, j] = np.where(self._in_arc(qx, qy), R[:, j], np.nan)
        return R, np.zeros(K, dtype=bool)


class ParametricCaster(_Caster):
    """Hits with a generic parametric curve: dense bracketing plus bisection.

    When z lies on the curve at parameter t_z, the crossing function is
    divided by (t - t_z) (by a periodic analogue for closed curves) so that
    hits close to z stay bracketed.  Hits closer to z than about 1e-16 in
    parameter are not resolved, which limits accuracy for sigma near 1.
    """

    def __init__(self, curve, frame, samples=4096):
        self.curve = curve
        self.frame = frame
        self.period = curve.beta - curve.alpha
        t = np.linspace(curve.alpha, curve.beta, samples + 1)
        P = self._local(t)
        self.scale = float(np.abs(P).max())
        self.t_z = None
        i = int(np.argmin(np.hypot(*P.T)))
        lo = t[max(i - 1, 0)]
        hi = t[min(i + 1, len(t) - 1)]
        for _ in range(200):
            m1 = lo + (hi - lo) / 3.0
            m2 = hi - (hi - lo) / 3.0
            if np.hypot(*self._local(np.array([m1]))[0]) < np.hypot(*self._local(np.array([m2]))[0]):
                hi = m2
            else:
                lo = m1
        tz = 0.5 * (lo + hi)
        if np.hypot(*self._local(np.array([tz]))[0]) <= 1e-9 * max(self.scale, 1.0):
            self.t_z = tz
            self.on_curve = True
            if curve.closed:
                off = np.linspace(-0.5, 0.5, samples + 1) * self.period
            else:
                off = np.linspace(curve.alpha - tz, curve.beta - tz, samples + 1)
                off = np.unique(np.concatenate([off, [0.0]]))
            self.zero = int(np.argmin(np.abs(off)))
            off[self.zero] = 0.0
            t = tz + off
            h = 1e-6 * self.period
            self.tangent = (self._local(np.array([tz + h]))[0] - self._local(np.array([tz - h]))[0])
            P = self._local(t)
        self.t = t
        self.P = P

    def _local(self, t):
        if self.curve.closed:
            t = self.curve.alpha + (t - self.curve.alpha) % self.period
        else:
            t = np.clip(t, self.curve.alpha, self.curve.beta)
        return self.frame.to_local(self.curve.eval(t))

    def _deflate(self, t):
        if self.t_z is None:
            return np.ones_like(t)
        if self.curve.closed:
            return np.sin(math.pi * (t - self.t_z) / self.period)
        return t - self.t_z

    def breakpoints(self):
        P = self.P
        dP = np.diff(P, axis=0)
        mid = 0.5 * (P[1:] + P[:-1])
        g = cross(dP, mid)
        idx = np.flatnonzero(np.sign(g[1:]) != np.sign(g[:-1])) + 1
        pts = [mid[idx]]
        if not self.curve.closed:
            pts.append(P[[0, -1]])
        V = np.concatenate(pts)
        V = V[np.hypot(*V.T) > 1e-12 * self.scale]
        return np.arctan2(V[:, 1], V[:, 0])

    def _g(self, E, P, t):
        with np.errstate(divide="ignore", invalid="ignore"):
            return (E[..., 0] * P[..., 1] - E[..., 1] * P[..., 0]) / self._deflate(t)

    def radii(self, E):
        K = len(E)
        G = self._g(E[:, None, :], self.P[None, :, :], self.t[None, :])
        if self.t_z is not None:
            # limit of the deflated crossing function at z
            lim = cross(E, self.tangent[None, :])
            G[:, self.zero] = lim * (self.period / math.pi if self.curve.closed else 1.0)
        k, i = np.nonzero(np.sign(G[:, 1:]) * np.sign(G[:, :-1]) < 0)
        if len(k) == 0:
            return np.zeros((K, 0)), np.zeros(K, dtype=bool)
        a = self.t[i]
        b = self.t[i + 1]
        ga = G[k, i]
        e = E[k]
        for _ in range(64):
            m = 0.5 * (a + b)
            gm = self._g(e, self._local(m), m)
            left = np.sign(gm) == np.sign(ga)
            a = np.where(left, m, a)
            ga = np.where(left, gm, ga)
            b = np.where(left, b, m)
        q = self._local(0.5 * (a + b))
        r = np.einsum("ij,ij->i", q, e)
        keep = r > 0
        k, r = k[keep], r[keep]
        counts = np.bincount(k, minlength=K)
        H = int(counts.max(initial=0))
        R = np.full((K, H), np.nan)
        order = np.argsort(k, kind="stable")
        k, r = k[order], r[order]
        slot = np.arange(len(k)) - np.repeat(np.cumsum(counts) - counts, counts)
        R[k, slot] = r
        return R, np.zeros(K, dtype=bool)


class _Union(_Caster):
    def __init__(self, parts):
        self.parts = parts
        self.on_curve = any(p.on_curve for p in parts)

    def breakpoints(self):
        bp = [p.breakpoints() for p in self.parts]
        return np.concatenate(bp) if bp else np.zeros(0)

    def radii(self, E):
        Rs, degs = zip(*(p.radii(E) for p in self.parts)) if self.parts else ((np.zeros((len(E), 0)),), (np.zeros(len(E), dtype=bool),))
        return np.concatenate(Rs, axis=1), np.any(np.stack(degs), axis=0)


def make_caster(curve, frame):
    """Ray caster for a CurveSet, Polyline, ParametricCurve or a list of those."""
    if isinstance(curve, (list, tuple)):
        return _Union([make_caster(c, frame) for c in curve])
    if isinstance(curve, Polyline):
        curve = CurveSet([curve], validate=False)
    if isinstance(curve, CurveSet):
        return PolylineCaster(curve, frame)
    if isinstance(curve, ParametricCurve):
        if curve.name == "circle":
            cx, cy, r = curve.params
            return CircleCaster((cx, cy), r, frame)
        if curve.name == "arc":
            cx, cy, r, t0, t1 = curve.params
            return CircleCaster((cx, cy), r, frame, arc=(t0, t1))
        return ParametricCaster(curve, frame)
    raise TypeError(f"cannot cast rays against {type(curve).__name__}")


# ---------------------------------------------------------------------------
# profiles


def ray_profile(curve, frame, theta, sigma):
    """Radial integral of the sign function along one ray, in frame angle ``theta``.

    Near z the sign is -1 on rays into the upper half-plane and +1 on rays
    into the lower one; it flips at every crossing.  Returns the head
    coefficient (which multiplies the divergent eps**-sigma / sigma) and the
    finite part.

    Raises
    ------
    DegenerateRayError
        If the ray runs along a positive-length part of the curve.
    """
    _check_sigma(sigma)
    caster = curve if isinstance(curve, _Caster) else make_caster(curve, frame)
    e = np.array([[math.cos(theta), math.sin(theta)]])
    R, deg = caster.radii(e)
    if deg[0]:
        raise DegenerateRayError(f"ray at angle {theta} is collinear with the curve")
    r = np.sort(R[0][~np.isnan(R[0])])
    c0 = -1.0 if math.sin(theta) > 0 else 1.0
    values = c0 * (-1.0) ** np.arange(len(r) + 1)
    return integrate_piecewise_constant(r, values, sigma)


def _pair_directions(phi, quarter):
    c, s = np.cos(phi), np.sin(phi)
    return np.stack([c if quarter == 0 else -c, s], axis=1)


def kappa_oracle(curve, frame, sigma, opts=None, details=False):
    """Nonlocal curvature by paired-ray angular quadrature.

    Parameters
    ----------
    curve : CurveSet, Polyline, ParametricCurve or list of them
        Circles and arcs from the catalog are cast analytically.
    frame : Frame
    sigma : float
    opts : OracleOptions, optional
    details : bool
        Return an :class:`OracleResult` instead of the bare value.

    Raises
    ------
    PVMismatchError
        If paired head coefficients fail to cancel.
    """
    _check_sigma(sigma)
    opts = opts or OracleOptions()
    if isinstance(curve, CurveSet) and curve.is_empty():
        res = OracleResult(0.0, 0.0, 0, True, False)
        return res if details else 0.0
    caster = make_caster(curve, frame)
    rng = np.random.default_rng(opts.perturbation_seed)
    stats = {"mismatch": 0.0, "nudged": 0}

    def radii_checked(E):
        out_R = []
        out_deg = np.zeros(len(E), dtype=bool)
        for s in range(0, len(E), _CHUNK):
            R, deg = caster.radii(E[s : s + _CHUNK])
            out_R.append(R)
            out_deg[s : s + _CHUNK] = deg
        H = max(R.shape[1] for R in out_R)
        R = np.concatenate([np.pad(R, ((0, 0), (0, H - R.shape[1])), constant_values=np.nan) for R in out_R])
        return R, out_deg

    def paired(phi, quarter, scale=None):
        E = _pair_directions(phi, quarter)
        EE = np.concatenate([E, -E])
        R, deg = radii_checked(EE)
        bad = deg[: len(E)] | deg[len(E) :]
        if np.any(bad):
            idx = np.flatnonzero(bad)
            stats["nudged"] += len(idx)
            phi2 = phi[idx] + NUDGE * rng.uniform(-1.0, 1.0, len(idx))
            E2 = _pair_directions(phi2, quarter)
            R2, deg2 = radii_checked(np.concatenate([E2, -E2]))
            if np.any(deg2):
                raise DegenerateRayError("ray stays degenerate after perturbation")
            H = max(R.shape[1], R2.shape[1])
            R = np.pad(R, ((0, 0), (0, H - R.shape[1])), constant_values=np.nan)
            R2 = np.pad(R2, ((0, 0), (0, H - R2.shape[1])), constant_values=np.nan)
            R[idx] = R2[: len(idx)]
            R[len(E) + idx] = R2[len(idx) :]
        n = len(E)
        head = np.where(EE[:, 1] > 0, -1.0, np.where(EE[:, 1] < 0, 1.0, 0.0))
        mismatch = np.abs(head[:n] + head[n:])
        if mismatch.size:
            stats["mismatch"] = max(stats["mismatch"], float(mismatch.max()))
        if np.any(mismatch > 1e-8):
            raise PVMismatchError("head coefficients of antipodal rays do not cancel")
        sc = None if scale is None else np.concatenate([scale, scale])
        S = _alternating(R, sigma, sc)
        return (S[:n] - S[n:]) / sigma

    # breakpoints folded into the two quarters
    bp = np.asarray(caster.breakpoints(), dtype=float) % math.pi
    q_pts = [
        np.concatenate([[0.0, HALF_PI], bp[bp <= HALF_PI]]),
        np.concatenate([[0.0, HALF_PI], math.pi - bp[bp > HALF_PI]]),
    ]
    total = 0.0
    error = 0.0
    intervals = 0
    converged = True
    tol = opts.theta_tolerance / 4.0
    singular = caster.on_curve
    p = 1.0 / (1.0 - sigma)
    for quarter in (0, 1):
        pts = np.unique(np.clip(q_pts[quarter], 0.0, HALF_PI))
        if singular:
            b1 = pts[1]
            front = p * b1 ** (1.0 - sigma)

            def f_sub(w, quarter=quarter, b1=b1, front=front):
                phi = b1 * w**p
                return front * paired(phi, quarter, scale=phi)

            r1 = integrate(f_sub, [0.0, 1.0], tol, opts.rel_tolerance, opts.max_subdivisions)
            total += r1.value
            error += r1.error
            intervals += r1.intervals
            converged &= r1.converged
            pts = pts[1:]
        r2 = integrate(lambda x, q=quarter: paired(x, q), pts, tol, opts.rel_tolerance, opts.max_subdivisions)
        total += r2.value
        error += r2.error
        intervals += r2.intervals
        converged &= r2.converged
    res = OracleResult(total, error, intervals, converged, singular, stats["mismatch"], stats["nudged"])
    return res if details else total


def kappa_radial_oracle(piece, frame, sigma, opts=None):
    """(1/sigma) * integral of r(theta)**-sigma over the piece's angular support.

    The piece must be radial with respect to ``frame.z`` and lie in one closed
    half-plane; pieces in the lower half-plane come out with a minus sign.

    Raises
    ------
    NotRadialError
        If some sampled ray from z meets the piece more than once.
    """
    _check_sigma(sigma)
    opts = opts or OracleOptions()
    curve = CurveSet([piece], validate=False) if isinstance(piece, Polyline) else piece
    if curve.is_empty():
        return 0.0
    A, B, _ = curve.segment_arrays()
    V = frame.to_local(np.concatenate([A, B]))
    side = 1.0
    if V[:, 1].sum() < 0:
        side = -1.0
        frame = frame.flipped()
        V = -V
    caster = PolylineCaster(curve, frame)
    ang = np.arctan2(V[:, 1], V[:, 0])
    ang = np.where(ang < -HALF_PI, ang + 2.0 * math.pi, ang)
    lo, hi = float(ang.min()), float(ang.max())
    if hi - lo <= 0.0:
        return 0.0

    def f(theta):
        E = np.stack([np.cos(theta), np.sin(theta)], axis=1)
        R, _ = caster.radii(E)
        hits = np.sum(~np.isnan(R), axis=1)
        if np.any(hits > 1):
            raise NotRadialError("piece is hit more than once by a ray from z")
        return np.where(np.isnan(R), 0.0, R ** (-sigma)).sum(axis=1) / sigma

    pts = np.unique(np.clip(ang, lo, hi))
    res = integrate(f, pts, opts.theta_tolerance, opts.rel_tolerance, opts.max_subdivisions)
    return side * res.value
