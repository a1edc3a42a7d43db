"""Planar primitives and the ray/segment predicates everything else uses.

Points are plain length-2 float arrays (or anything ``np.asarray`` turns into
one).  Polylines store their vertices as an ``(N, 2)`` float array; a polyline
whose last vertex equals its first is treated as closed.
"""

from dataclasses import dataclass
from enum import Enum
import math

import numpy as np

from .errors import DegenerateRayError, GeometryError

# relative tolerance on orientation determinants
EPS = 1e-12
# brute-force pair testing below this many segments, spatial hashing above
_BRUTE_FORCE_LIMIT = 1500


def as_point(p):
    p = np.asarray(p, dtype=float).reshape(2)
    if not np.all(np.isfinite(p)):
        raise GeometryError(f"point coordinates must be finite, got {p}")
    return p


def cross(a, b):
    """z-component of the 2-D cross product, broadcasting over leading axes."""
    a = np.asarray(a)
    b = np.asarray(b)
    return a[..., 0] * b[..., 1] - a[..., 1] * b[..., 0]


def unit_vector(v):
    """Normalise ``v``; raises ValueError for the zero vector."""
    v = np.asarray(v, dtype=float).reshape(2)
    n = math.hypot(v[0], v[1])
    if not np.isfinite(n) or n == 0.0:
        raise ValueError("unit vector must be nonzero")
    return v / n


@dataclass(frozen=True)
class Segment:
    a: tuple
    b: tuple

    def __post_init__(self):
        a = tuple(float(c) for c in self.a)
        b = tuple(float(c) for c in self.b)
        if a == b:
            raise GeometryError("segment endpoints must differ")
        object.__setattr__(self, "a", a)
        object.__setattr__(self, "b", b)

    @property
    def length(self):
        return math.hypot(self.b[0] - self.a[0], self.b[1] - self.a[1])


@dataclass(frozen=True)
class Frame:
    """Evaluation point ``z`` together with the unit vector ``u``."""

    z: np.ndarray
    u: np.ndarray

    def __post_init__(self):
        z = as_point(self.z)
        u = np.asarray(self.u, dtype=float).reshape(2)
        if abs(math.hypot(u[0], u[1]) - 1.0) > 1e-12:
            raise ValueError("frame direction must be a unit vector (use Frame.make)")
        object.__setattr__(self, "z", z)
        object.__setattr__(self, "u", u)

    @classmethod
    def make(cls, z, u):
        return cls(as_point(z), unit_vector(u))

    @property
    def u_perp(self):
        """u rotated clockwise by 90 degrees."""
        return np.array([self.u[1], -self.u[0]])

    def flipped(self):
        return Frame(self.z, -self.u)

    def to_local(self, pts):
        """Map points (..., 2) to frame coordinates: z -> origin, u -> +y."""
        d = np.asarray(pts, dtype=float) - self.z
        ux, uy = self.u
        x = d[..., 0] * uy - d[..., 1] * ux
        y = d[..., 0] * ux + d[..., 1] * uy
        return np.stack([x, y], axis=-1)

    def from_local(self, pts):
        q = np.asarray(pts, dtype=float)
        ux, uy = self.u
        x = q[..., 0] * uy + q[..., 1] * ux
        y = -q[..., 0] * ux + q[..., 1] * uy
        return np.stack([x, y], axis=-1) + self.z


def to_frame_coords(p, frame):
    """Translate by -z and rotate so that ``frame.u`` becomes (0, 1)."""
    return frame.to_local(p)


class Polyline:
    """Ordered vertex chain with at least two distinct consecutive vertices.

    ``validate=True`` additionally checks that the chain is simple.
    """

    __slots__ = ("vertices",)

    def __init__(self, vertices, validate=True):
        v = np.array(vertices, dtype=float)
        if v.ndim != 2 or v.shape[1] != 2 or v.shape[0] < 2:
            raise GeometryError("a polyline needs at least two 2-D vertices")
        if not np.all(np.isfinite(v)):
            raise GeometryError("polyline vertices must be finite")
        if np.any(np.all(v[1:] == v[:-1], axis=1)):
            raise GeometryError("consecutive polyline vertices must be distinct")
        v.setflags(write=False)
        self.vertices = v
        if validate:
            check_simple([self])

    @property
    def closed(self):
        return len(self.vertices) >= 4 and bool(np.all(self.vertices[0] == self.vertices[-1]))

    @property
    def starts(self):
        return self.vertices[:-1]

    @property
    def ends(self):
        return self.vertices[1:]

    @property
    def n_segments(self):
        return len(self.vertices) - 1

    @property
    def length(self):
        return float(np.hypot(*(self.ends - self.starts).T).sum())

    def segments(self):
        return [Segment(tuple(a), tuple(b)) for a, b in zip(self.starts, self.ends)]

    def __len__(self):
        return self.n_segments

    def __repr__(self):
        tag = "closed" if self.closed else "open"
        return f"Polyline({self.n_segments} segments, {tag})"


class CurveSet:
    """A finite union of pairwise disjoint simple polylines."""

    __slots__ = ("components",)

    def __init__(self, components=(), validate=True):
        comps = []
        for c in components:
            comps.append(c if isinstance(c, Polyline) else Polyline(c, validate=False))
        self.components = tuple(comps)
        if validate and comps:
            check_simple(self.components)

    @classmethod
    def from_segments(cls, segments, validate=True):
        return cls([Polyline([s.a, s.b], validate=False) for s in segments], validate=validate)

    def is_empty(self):
        return len(self.components) == 0

    @property
    def n_segments(self):
        return sum(c.n_segments for c in self.components)

    @property
    def length(self):
        return sum(c.length for c in self.components)

    def segment_arrays(self):
        """Stacked segment endpoints ``(A, B)`` plus polyline index per segment."""
        if not self.components:
            empty = np.zeros((0, 2))
            return empty, empty, np.zeros(0, dtype=int)
        A = np.concatenate([c.starts for c in self.components])
        B = np.concatenate([c.ends for c in self.components])
        owner = np.concatenate(
            [np.full(c.n_segments, i, dtype=int) for i, c in enumerate(self.components)]
        )
        return A, B, owner

    def __iter__(self):
        return iter(self.components)

    def __len__(self):
        return len(self.components)

    def __repr__(self):
        return f"CurveSet({len(self.components)} components, {self.n_segments} segments)"


# ---------------------------------------------------------------------------
# simplicity / disjointness checks


def _adjacent_pairs(components):
    """Global index pairs (i, i+1) of segments sharing a vertex inside a polyline."""
    pairs = []
    offset = 0
    for c in components:
        m = c.n_segments
        idx = np.arange(offset, offset + m - 1)
        pairs.append(np.stack([idx, idx + 1], axis=1))
        if c.closed and m >= 3:
            pairs.append(np.array([[offset, offset + m - 1]]))
        offset += m
    if not pairs:
        return np.zeros((0, 2), dtype=int)
    return np.concatenate(pairs)


def _candidate_pairs(A, B):
    """Segment index pairs whose bounding boxes may overlap."""
    m = len(A)
    if m <= _BRUTE_FORCE_LIMIT:
        i, j = np.triu_indices(m, k=1)
        return i, j
    lo = np.minimum(A, B)
    hi = np.maximum(A, B)
    lengths = np.hypot(*(B - A).T)
    span = float((hi.max(axis=0) - lo.min(axis=0)).max())
    cell = max(2.0 * float(np.median(lengths)), span * 1e-7, 1e-300)
    long_ = np.flatnonzero(lengths > 4.0 * cell)
    short = np.flatnonzero(lengths <= 4.0 * cell)
    out_i, out_j = [], []

    # long segments: bounding-box filter against everything
    for k in long_:
        cand = np.flatnonzero(
            (lo[:, 0] <= hi[k, 0]) & (hi[:, 0] >= lo[k, 0])
            & (lo[:, 1] <= hi[k, 1]) & (hi[:, 1] >= lo[k, 1])
        )
        cand = cand[cand != k]
        out_i.append(np.full(len(cand), k))
        out_j.append(cand)

    # short segments: uniform grid, each covers at most 5x5 cells
    origin = lo.min(axis=0)
    i0 = np.floor((lo[short] - origin) / cell).astype(np.int64)
    i1 = np.floor((hi[short] - origin) / cell).astype(np.int64)
    nx = i1[:, 0] - i0[:, 0] + 1
    ny = i1[:, 1] - i0[:, 1] + 1
    counts = nx * ny
    owner = np.repeat(np.arange(len(short)), counts)
    start = np.repeat(np.cumsum(counts) - counts, counts)
    off = np.arange(counts.sum()) - start
    cx = i0[owner, 0] + off % nx[owner]
    cy = i0[owner, 1] + off // nx[owner]
    seg = short[owner]
    key = cx * (int(i1[:, 1].max()) + 2) + cy
    order = np.lexsort((seg, key))
    key = key[order]
    seg = seg[order]
    bounds = np.flatnonzero(np.diff(key)) + 1
    group_start = np.concatenate([[0], bounds])
    group_size = np.diff(np.concatenate([group_start, [len(key)]]))
    for size in np.unique(group_size):
        if size < 2:
            continue
        starts = group_start[group_size == size]
        members = seg[starts[:, None] + np.arange(size)[None, :]]
        a, b = np.triu_indices(size, k=1)
        out_i.append(members[:, a].ravel())
        out_j.append(members[:, b].ravel())
    if not out_i:
        return np.zeros(0, dtype=int), np.zeros(0, dtype=int)
    pi = np.concatenate(out_i)
    pj = np.concatenate(out_j)
    code = np.unique(np.minimum(pi, pj).astype(np.int64) * m + np.maximum(pi, pj))
    return code // m, code % m


def _segments_touch(a1, b1, a2, b2):
    """Vectorised closed-segment intersection test with a relative tolerance."""
    d1 = b1 - a1
    d2 = b2 - a2
    scale = np.maximum(np.hypot(*d1.T), np.hypot(*d2.T))
    tol = EPS * scale * scale
    o1 = cross(d1, a2 - a1)
    o2 = cross(d1, b2 - a1)
    o3 = cross(d2, a1 - a2)
    o4 = cross(d2, b1 - a2)
    s1 = np.where(np.abs(o1) <= tol, 0, np.sign(o1))
    s2 = np.where(np.abs(o2) <= tol, 0, np.sign(o2))
    s3 = np.where(np.abs(o3) <= tol, 0, np.sign(o3))
    s4 = np.where(np.abs(o4) <= tol, 0, np.sign(o4))
    general = (s1 * s2 <= 0) & (s3 * s4 <= 0)
    collinear = (s1 == 0) & (s2 == 0)
    # collinear: general test passes trivially; require 1-D overlap instead
    t_a2 = np.einsum("ij,ij->i", a2 - a1, d1)
    t_b2 = np.einsum("ij,ij->i", b2 - a1, d1)
    ll = np.einsum("ij,ij->i", d1, d1)
    overlap = (np.maximum(t_a2, t_b2) >= -tol) & (np.minimum(t_a2, t_b2) <= ll + tol)
    return np.where(collinear, overlap, general)


def check_simple(components):
    """Raise GeometryError unless the polylines are simple and pairwise disjoint."""
    comps = list(components)
    if not comps:
        return
    A = np.concatenate([c.starts for c in comps])
    B = np.concatenate([c.ends for c in comps])
    m = len(A)
    adj = _adjacent_pairs(comps)
    if len(adj):
        d1 = B[adj[:, 0]] - A[adj[:, 0]]
        d2 = B[adj[:, 1]] - A[adj[:, 1]]
        c = cross(d1, d2)
        dot = np.einsum("ij,ij->i", d1, d2)
        scale = np.hypot(*d1.T) * np.hypot(*d2.T)
        folded = (np.abs(c) <= EPS * scale) & (dot < 0)
        if np.any(folded):
            raise GeometryError("polyline folds back onto itself")
    if m < 2:
        return
    i, j = _candidate_pairs(A, B)
    if len(i) == 0:
        return
    # drop pairs of consecutive segments inside one polyline
    owner = np.concatenate([np.full(c.n_segments, k) for k, c in enumerate(comps)])
    first = np.concatenate([[0], np.cumsum([c.n_segments for c in comps])[:-1]])
    size = np.array([c.n_segments for c in comps])
    closed = np.array([c.closed and c.n_segments >= 3 for c in comps])
    lo, hi = np.minimum(i, j), np.maximum(i, j)
    same = owner[lo] == owner[hi]
    o = owner[lo]
    consecutive = same & (hi - lo == 1)
    wrapped = same & closed[o] & (lo == first[o]) & (hi == first[o] + size[o] - 1)
    keep = ~(consecutive | wrapped)
    i, j = i[keep], j[keep]
    if len(i) == 0:
        return
    hit = _segments_touch(A[i], B[i], A[j], B[j])
    if np.any(hit):
        k = int(np.flatnonzero(hit)[0])
        raise GeometryError(
            f"curve is not simple: segments {int(i[k])} and {int(j[k])} intersect"
        )


# ---------------------------------------------------------------------------
# rays and crossings


def _ray_hits_local(A, B, e):
    """Hits of the ray r*e (r > 0) from the origin with segments A->B.

    Endpoints lying on the ray's supporting line are assigned to the
    non-positive side, so a ray through a shared vertex counts one crossing
    when the curve passes through and zero or two when it only touches.
    Returns (radii, indices) unsorted.
    """
    D = B - A
    la = np.hypot(*A.T)
    lb = np.hypot(*B.T)
    sa = cross(e, A)
    sb = cross(e, B)
    on_a = np.abs(sa) <= EPS * la
    on_b = np.abs(sb) <= EPS * lb
    front_a = A @ e > 0
    front_b = B @ e > 0
    collinear = on_a & on_b & (front_a | front_b)
    if np.any(collinear):
        raise DegenerateRayError("ray is collinear with a curve segment")
    pa = (sa > 0) & ~on_a
    pb = (sb > 0) & ~on_b
    straddle = pa != pb
    denom = cross(e, D)
    with np.errstate(divide="ignore", invalid="ignore"):
        r = cross(A, D) / denom
    good = straddle & (denom != 0) & (r > 0)
    return r[good], np.flatnonzero(good)


def ray_hits(origin, theta, curve):
    """All crossings of the open ray from ``origin`` at angle ``theta``.

    Returns a list of ``(r, segment_id)`` sorted by increasing r; segment ids
    index the stacked segments of ``curve``.  Coincident hits from a ray
    touching a vertex without crossing cancel in pairs and are dropped.

    Raises
    ------
    DegenerateRayError
        When the ray runs along a positive-length part of the curve.
    """
    origin = as_point(origin)
    A, B, _ = curve.segment_arrays()
    if len(A) == 0:
        return []
    e = np.array([math.cos(theta), math.sin(theta)])
    r, idx = _ray_hits_local(A - origin, B - origin, e)
    order = np.argsort(r, kind="stable")
    r, idx = r[order], idx[order]
    hits = []
    k = 0
    while k < len(r):
        if k + 1 < len(r) and abs(r[k + 1] - r[k]) <= EPS * max(r[k], 1.0):
            k += 2
            continue
        hits.append((float(r[k]), int(idx[k])))
        k += 1
    return hits


class Parity(Enum):
    ODD = "odd"
    EVEN = "even"
    DEGENERATE = "degenerate"


def count_crossings(x, y, curve, include_end=False):
    """Number of transversal crossings of the segment from x to y with the curve.

    The start point is always excluded; ``include_end`` decides whether a
    crossing located exactly at ``y`` counts.  Raises DegenerateRayError
    when the segment passes through a curve vertex or runs along a curve
    segment.
    """
    x = as_point(x)
    y = as_point(y)
    A, B, _ = curve.segment_arrays()
    if len(A) == 0:
        return 0
    D = y - x
    L = math.hypot(*D)
    if L == 0.0:
        raise ValueError("crossing test needs x != y")
    d = B - A
    ld = np.hypot(*d.T)
    denom = cross(D, d)
    ax = A - x
    parallel = np.abs(denom) <= EPS * L * ld
    if np.any(parallel):
        # collinear and overlapping the open segment is non-transversal
        off = np.abs(cross(D, ax[parallel])) <= EPS * L * np.maximum(ld[parallel], L)
        if np.any(off):
            t0 = (ax[parallel] @ D) / (L * L)
            t1 = ((B - x)[parallel] @ D) / (L * L)
            lo = np.minimum(t0, t1)
            hi = np.maximum(t0, t1)
            if np.any(off & (hi > 0) & (lo < 1)):
                raise DegenerateRayError("segment runs along the curve")
    with np.errstate(divide="ignore", invalid="ignore"):
        s = cross(ax, d) / denom  # along x->y
        t = cross(ax, D) / denom  # along the curve segment
    s_tol = EPS * 1e2
    t_tol = EPS * 1e2
    ok = ~parallel
    end_cut = (s <= 1 + s_tol) if include_end else (s < 1 - s_tol)
    in_s = ok & (s > s_tol) & end_cut
    at_vertex = in_s & (np.abs(t) <= t_tol) | in_s & (np.abs(t - 1) <= t_tol)
    if np.any(at_vertex):
        raise DegenerateRayError("segment passes through a curve vertex")
    return int(np.count_nonzero(in_s & (t > t_tol) & (t < 1 - t_tol)))


def crossing_parity(x, y, curve):
    """Parity of the number of crossings of the open segment (x, y)."""
    try:
        n = count_crossings(x, y, curve, include_end=False)
    except DegenerateRayError:
        return Parity.DEGENERATE
    return Parity.ODD if n % 2 else Parity.EVEN


def point_segment_distance(p, A, B):
    """Distances from point p to each segment A[i]->B[i]."""
    p = np.asarray(p, dtype=float)
    d = B - A
    ll = np.einsum("ij,ij->i", d, d)
    t = np.clip(np.einsum("ij,ij->i", p - A, d) / ll, 0.0, 1.0)
    q = A + t[:, None] * d
    return np.hypot(*(p - q).T), t


# ---------------------------------------------------------------------------
# labelled refinement: split segments at parameter values and regroup runs


def split_runs(poly, run_seg, run_t0, run_t1, run_label):
    """Cut a polyline into maximal runs of equal nonzero label.

    ``run_seg/run_t0/run_t1/run_label`` describe consecutive sub-intervals of
    the polyline's segments in curve order, covering every segment.  Label 0
    marks parts to be discarded.  Returns a list of ``(label, Polyline)``.
    """
    V = poly.vertices
    A = V[:-1][run_seg]
    D = (V[1:] - V[:-1])[run_seg]
    start = A + run_t0[:, None] * D
    end = A + run_t1[:, None] * D
    # snap to exact vertices
    start = np.where((run_t0 == 0.0)[:, None], V[:-1][run_seg], start)
    start = np.where((run_t0 == 1.0)[:, None], V[1:][run_seg], start)
    end = np.where((run_t1 == 1.0)[:, None], V[1:][run_seg], end)
    end = np.where((run_t1 == 0.0)[:, None], V[:-1][run_seg], end)

    n = len(run_label)
    if n == 0:
        return []
    change = np.flatnonzero(run_label[1:] != run_label[:-1]) + 1
    group_start = np.concatenate([[0], change])
    group_end = np.concatenate([change, [n]])
    groups = [(int(run_label[s]), s, e) for s, e in zip(group_start, group_end)]

    wrap = (
        poly.closed
        and len(groups) > 1
        and groups[0][0] == groups[-1][0]
        and groups[0][0] != 0
        and run_seg[0] == 0
        and run_t0[0] == 0.0
        and run_seg[-1] == poly.n_segments - 1
        and run_t1[-1] == 1.0
    )
    pieces = []
    for gi, (label, s, e) in enumerate(groups):
        if label == 0:
            continue
        if wrap and gi == 0:
            continue
        pts = np.concatenate([start[s:e], end[e - 1 : e]])
        if wrap and gi == len(groups) - 1:
            ls, le = groups[0][1], groups[0][2]
            pts = np.concatenate([pts, end[ls:le]])
        pts = _drop_repeats(pts)
        if len(pts) >= 2:
            pieces.append((label, Polyline(pts, validate=False)))
    return pieces


def _drop_repeats(pts):
    keep = np.ones(len(pts), dtype=bool)
    keep[1:] = np.any(pts[1:] != pts[:-1], axis=1)
    return pts[keep]


def halfplane_clip(curve, frame):
    """Split a curve into its parts in the open upper and lower half-planes.

    The dividing line passes through ``frame.z`` orthogonally to ``frame.u``.
    Segments are cut where they cross the line; positive-length pieces lying
    on the line are dropped.  Returns ``(upper, lower)`` CurveSets.
    """
    upper, lower = [], []
    for poly in curve.components:
        local = frame.to_local(poly.vertices)
        yv = local[:, 1]
        scale = np.maximum(np.abs(local).max(), 1e-300)
        tol = EPS * scale
        side = np.where(yv > tol, 1, np.where(yv < -tol, -1, 0))
        sa, sb = side[:-1], side[1:]
        ya, yb = yv[:-1], yv[1:]
        m = poly.n_segments
        crossing = sa * sb < 0
        count = np.where(crossing, 2, 1)
        segs = np.repeat(np.arange(m), count)
        second = np.zeros(len(segs), dtype=bool)
        second[1:] = segs[1:] == segs[:-1]
        with np.errstate(divide="ignore", invalid="ignore"):
            tc = np.where(crossing, ya / (ya - yb), 0.0)[segs]
        cr = crossing[segs]
        t0s = np.where(cr & second, tc, 0.0)
        t1s = np.where(cr & ~second, tc, 1.0)
        plain = np.where(sa != 0, sa, sb)[segs]
        labels = np.where(cr, np.where(second, sb[segs], sa[segs]), plain)
        pieces = split_runs(poly, segs, t0s, t1s, labels)
        for label, piece in pieces:
            (upper if label > 0 else lower).append(piece)
    return CurveSet(upper, validate=False), CurveSet(lower, validate=False)
