"""Parametric curves and their linear interpolating splines."""

from dataclasses import dataclass, field
import math

import numpy as np

from .errors import DegenerateCurveError, DomainError, InvalidParamsError, UnknownCurveError
from .geometry import Polyline

TWO_PI = 2.0 * math.pi


@dataclass(frozen=True)
class ParametricCurve:
    """A map [alpha, beta] -> R^2 evaluated on arrays of parameter values.

    Attributes
    ----------
    func : callable
        ``func(t)`` takes a 1-D array and returns an ``(len(t), 2)`` array.
    alpha, beta : float
        Parameter domain, ``alpha < beta``.
    holder : float
        Claimed Hoelder exponent of the derivative, in (0, 1].
    closed : bool
        Whether ``func(alpha)`` and ``func(beta)`` describe the same point.
    name, params :
        Catalog identity, if the curve came from :func:`catalog`.
    """

    func: object
    alpha: float
    beta: float
    holder: float = 1.0
    closed: bool = False
    name: str = "custom"
    params: tuple = ()
    table_size: int = field(default=0, compare=False)

    def __post_init__(self):
        if not (self.alpha < self.beta):
            raise DomainError(f"parameter domain needs alpha < beta, got [{self.alpha}, {self.beta}]")
        if not (0.0 < self.holder <= 1.0):
            raise DomainError(f"Hoelder exponent must lie in (0, 1], got {self.holder}")

    def eval(self, t):
        t = np.atleast_1d(np.asarray(t, dtype=float))
        return np.asarray(self.func(t), dtype=float).reshape(len(t), 2)

    @classmethod
    def from_samples(cls, t, points, holder=1.0, closed=False, name="table"):
        """Curve given by a sample table with linear lookup in the parameter."""
        t = np.asarray(t, dtype=float)
        pts = np.asarray(points, dtype=float)
        if t.ndim != 1 or pts.shape != (len(t), 2) or len(t) < 2:
            raise DomainError("sample table needs matching 1-D parameters and (N, 2) points")
        if np.any(np.diff(t) <= 0):
            raise DomainError("sample parameters must increase strictly")
        xs, ys = pts[:, 0].copy(), pts[:, 1].copy()

        def func(s):
            return np.stack([np.interp(s, t, xs), np.interp(s, t, ys)], axis=1)

        return cls(func, float(t[0]), float(t[-1]), holder, closed, name, (), len(t))


@dataclass(frozen=True)
class SplineResult:
    polyline: Polyline
    n: int
    partition: np.ndarray


def uniform_partition(alpha, beta, n):
    k = np.arange(n + 1)
    t = alpha + k * (beta - alpha) / n
    t[-1] = beta
    return t


def interpolate(curve, n, validate=True):
    """Linear interpolating spline through ``curve`` at n + 1 uniform parameters.

    For closed curves the last vertex reuses the first sample so that the
    polyline closes exactly.  Repeated consecutive samples are merged.

    Raises
    ------
    DegenerateCurveError
        If every sample is the same point.
    GeometryError
        If ``validate`` is set and the spline intersects itself.
    """
    n = int(n)
    if n < 1:
        raise DomainError(f"spline needs n >= 1, got {n}")
    if curve.table_size and curve.table_size - 1 < 8 * n:
        raise DomainError(
            f"sample table with {curve.table_size} points is too coarse for n = {n}; "
            f"need at least {8 * n + 1}"
        )
    t = uniform_partition(curve.alpha, curve.beta, n)
    pts = curve.eval(t)
    if curve.closed:
        pts[-1] = pts[0]
    keep = np.ones(len(pts), dtype=bool)
    keep[1:] = np.any(pts[1:] != pts[:-1], axis=1)
    pts = pts[keep]
    if curve.closed and len(pts) >= 2 and np.all(pts[-1] == pts[-2]):
        pts = pts[:-1]
    if len(pts) < 2 or np.all(pts == pts[0]):
        raise DegenerateCurveError("all spline samples coincide")
    if curve.closed and len(pts) < 4:
        raise DegenerateCurveError(f"closed curve needs n >= 3, got {n}")
    return SplineResult(Polyline(pts, validate=validate), n, t)


# ---------------------------------------------------------------------------
# catalog


def _circle(cx, cy, r):
    def f(t):
        return np.stack([cx + r * np.cos(t), cy + r * np.sin(t)], axis=1)

    return f


def _need(name, params, counts):
    if len(params) not in counts:
        want = " or ".join(str(c) for c in counts)
        raise InvalidParamsError(f"{name} takes {want} parameters, got {len(params)}")
    if not all(math.isfinite(p) for p in params):
        raise InvalidParamsError(f"{name} parameters must be finite")


def catalog(name, params):
    """Built-in parametric curves.

    ======== ===================================== ======================
    name     params                                domain
    ======== ===================================== ======================
    circle   cx, cy, r                             [0, 2pi], closed
    arc      cx, cy, r, t0, t1                     [t0, t1]
    ellipse  cx, cy, a, b[, rot]                   [0, 2pi], closed
    graph_poly x0, x1, c0, c1, ...  (y = sum c_k x^k) [x0, x1]
    graph_sin  x0, x1, A, w[, phase] (y = A sin(w x + phase)) [x0, x1]
    spiral   c, th0, th1[, cx, cy]  (r = c th)     [th0, th1]
    ======== ===================================== ======================
    """
    params = tuple(float(p) for p in params)
    if name == "circle":
        _need(name, params, (3,))
        cx, cy, r = params
        if r <= 0:
            raise InvalidParamsError("circle radius must be positive")
        return ParametricCurve(_circle(cx, cy, r), 0.0, TWO_PI, 1.0, True, name, params)
    if name == "arc":
        _need(name, params, (5,))
        cx, cy, r, t0, t1 = params
        if r <= 0:
            raise InvalidParamsError("arc radius must be positive")
        if not (t0 < t1 < t0 + TWO_PI):
            raise InvalidParamsError("arc needs t0 < t1 < t0 + 2pi")
        return ParametricCurve(_circle(cx, cy, r), t0, t1, 1.0, False, name, params)
    if name == "ellipse":
        _need(name, params, (4, 5))
        cx, cy, a, b = params[:4]
        rot = params[4] if len(params) == 5 else 0.0
        if a <= 0 or b <= 0:
            raise InvalidParamsError("ellipse semi-axes must be positive")
        c, s = math.cos(rot), math.sin(rot)

        def f(t):
            x, y = a * np.cos(t), b * np.sin(t)
            return np.stack([cx + c * x - s * y, cy + s * x + c * y], axis=1)

        return ParametricCurve(f, 0.0, TWO_PI, 1.0, True, name, params)
    if name == "graph_poly":
        if len(params) < 3:
            raise InvalidParamsError("graph_poly takes x0, x1 and at least one coefficient")
        _need(name, params, (len(params),))
        x0, x1 = params[:2]
        coef = np.array(params[2:])
        if not x0 < x1:
            raise InvalidParamsError("graph_poly needs x0 < x1")

        def f(t):
            return np.stack([t, np.polynomial.polynomial.polyval(t, coef)], axis=1)

        return ParametricCurve(f, x0, x1, 1.0, False, name, params)
    if name == "graph_sin":
        _need(name, params, (4, 5))
        x0, x1, amp, w = params[:4]
        phase = params[4] if len(params) == 5 else 0.0
        if not x0 < x1:
            raise InvalidParamsError("graph_sin needs x0 < x1")

        def f(t):
            return np.stack([t, amp * np.sin(w * t + phase)], axis=1)

        return ParametricCurve(f, x0, x1, 1.0, False, name, params)
    if name == "spiral":
        _need(name, params, (3, 5))
        c, th0, th1 = params[:3]
        cx, cy = params[3:] if len(params) == 5 else (0.0, 0.0)
        if c == 0 or not th0 < th1:
            raise InvalidParamsError("spiral needs c != 0 and th0 < th1")

        def f(t):
            return np.stack([cx + c * t * np.cos(t), cy + c * t * np.sin(t)], axis=1)

        return ParametricCurve(f, th0, th1, 1.0, False, name, params)
    raise UnknownCurveError(f"unknown catalog curve {name!r}")


CATALOG_NAMES = ("circle", "arc", "ellipse", "graph_poly", "graph_sin", "spiral")
