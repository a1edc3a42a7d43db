"""Angular sweep around z: radial layers, half-plane parts and components.

The sweep cuts the plane around z into wedges bounded by the directions of
curve vertices.  Inside a wedge no vertex is visible, so the segments that
cross it are totally ordered by distance from z; the k-th nearest one is
assigned to layer k.  Per segment, runs of wedges with equal layer are merged
back and the runs are reassembled along each polyline.
"""

from dataclasses import dataclass, field
import math

import numpy as np

from .errors import ZOnCurveError
from .geometry import EPS, CurveSet, Polyline, as_point, cross, halfplane_clip, split_runs

ANGLE_MERGE = 1e-12
ON_CURVE_TOL = 1e-9
TWO_PI = 2.0 * math.pi


@dataclass(frozen=True)
class LayerPiece:
    layer_index: int
    piece: Polyline
    sign: int


@dataclass
class LayerDecomposition:
    z: np.ndarray
    pieces: list
    max_layer: int
    diagnostics: list = field(default_factory=list)

    def layer(self, n):
        """All pieces of layer ``n`` as one CurveSet."""
        return CurveSet([p.piece for p in self.pieces if p.layer_index == n], validate=False)


@dataclass(frozen=True)
class DecomposedPiece:
    """A radial, connected piece in one open half-plane of the frame."""

    sign: int
    piece: Polyline
    layer: int
    side: int  # +1 upper half-plane, -1 lower


def _merge_events(angles):
    """Sorted unique event angles in [0, 2pi) with near-duplicates merged."""
    a = np.sort(angles)
    keep = np.ones(len(a), dtype=bool)
    keep[1:] = np.diff(a) > ANGLE_MERGE
    ev = a[keep]
    if len(ev) > 1 and ev[-1] - ev[0] > TWO_PI - ANGLE_MERGE:
        ev = ev[:-1]
    return ev


def _event_index(ev, angles):
    """Index of the event nearest to each angle, cyclically."""
    k = len(ev)
    j = np.searchsorted(ev, angles)
    lo = (j - 1) % k
    hi = j % k
    dlo = np.abs((angles - ev[lo] + math.pi) % TWO_PI - math.pi)
    dhi = np.abs((angles - ev[hi] + math.pi) % TWO_PI - math.pi)
    return np.where(dlo <= dhi, lo, hi)


def distance_to_curve(curve, z):
    """Smallest distance from z to any segment of the curve (inf if empty)."""
    A, B, _ = curve.segment_arrays()
    if len(A) == 0:
        return math.inf
    z = as_point(z)
    D = B - A
    ll = np.einsum("ij,ij->i", D, D)
    t = np.clip(np.einsum("ij,ij->i", z - A, D) / ll, 0.0, 1.0)
    q = A + t[:, None] * D
    return float(np.min(np.hypot(*(z - q).T)))


def radial_layers(curve, z):
    """Split a curve into radial layers with respect to z.

    Parameters
    ----------
    curve : CurveSet
    z : array_like
        Evaluation point; must not lie on the curve.

    Returns
    -------
    LayerDecomposition
        Pieces in polyline order, each tagged with its layer n >= 1 and the
        sign (-1)**(n+1).  Segments lying on a ray from z are dropped and
        listed in ``diagnostics``.

    Raises
    ------
    ZOnCurveError
        If z is within ``ON_CURVE_TOL`` of the curve.
    """
    z = as_point(z)
    if curve.is_empty():
        return LayerDecomposition(z, [], 0, [])
    if distance_to_curve(curve, z) <= ON_CURVE_TOL:
        raise ZOnCurveError(f"z = {tuple(z)} lies on the curve")

    A, B, owner = curve.segment_arrays()
    A = A - z
    B = B - z
    D = B - A
    m = len(A)
    ra = np.hypot(A[:, 0], A[:, 1])
    rb = np.hypot(B[:, 0], B[:, 1])
    turn = np.arctan2(cross(A, B), np.einsum("ij,ij->i", A, B))
    radial = np.abs(cross(A, B)) <= EPS * ra * rb
    diagnostics = []
    if np.any(radial):
        diagnostics.append(
            f"{int(radial.sum())} segment(s) lie on rays from z and were excluded"
        )

    ang_a = np.arctan2(A[:, 1], A[:, 0]) % TWO_PI
    ang_b = np.arctan2(B[:, 1], B[:, 0]) % TWO_PI
    live = ~radial
    if not np.any(live):
        return LayerDecomposition(z, [], 0, diagnostics)
    ev = _merge_events(np.concatenate([ang_a[live], ang_b[live]]))
    k = len(ev)
    ia = _event_index(ev, ang_a)
    ib = _event_index(ev, ang_b)
    ccw = turn > 0
    first = np.where(ccw, ia, ib)
    last = np.where(ccw, ib, ia)
    nwedge = np.where(live, (last - first) % k, 0)
    tiny = live & (nwedge == 0)
    if np.any(tiny):
        diagnostics.append(
            f"{int(tiny.sum())} segment(s) subtend less than {ANGLE_MERGE:g} rad and were excluded"
        )

    seg = np.repeat(np.arange(m), nwedge)
    start = np.repeat(np.cumsum(nwedge) - nwedge, nwedge)
    step = np.arange(len(seg)) - start
    wedge = (first[seg] + step) % k
    lo_ang = ev[wedge]
    hi_ang = np.where(wedge + 1 < k, ev[(wedge + 1) % k], ev[0] + TWO_PI)
    mid = 0.5 * (lo_ang + hi_ang)
    e = np.stack([np.cos(mid), np.sin(mid)], axis=1)
    r = cross(A[seg], D[seg]) / cross(e, D[seg])

    order = np.lexsort((r, wedge))
    ws = wedge[order]
    grp = np.concatenate([[0], np.flatnonzero(np.diff(ws)) + 1])
    grp_of = np.repeat(grp, np.diff(np.concatenate([grp, [len(ws)]])))
    layer = np.empty(len(seg), dtype=np.int64)
    layer[order] = np.arange(len(ws)) - grp_of + 1

    # curve parameter at the wedge boundaries, exact at segment ends
    def t_at(phi):
        ee = np.stack([np.cos(phi), np.sin(phi)], axis=1)
        return cross(A[seg], ee) / cross(ee, D[seg])

    t_lo = t_at(lo_ang)
    t_hi = t_at(hi_ang)
    s_ccw = ccw[seg]
    is_first = step == 0
    is_last = step == nwedge[seg] - 1
    t_lo = np.where(is_first, np.where(s_ccw, 0.0, 1.0), t_lo)
    t_hi = np.where(is_last, np.where(s_ccw, 1.0, 0.0), t_hi)
    t0 = np.clip(np.minimum(t_lo, t_hi), 0.0, 1.0)
    t1 = np.clip(np.maximum(t_lo, t_hi), 0.0, 1.0)

    # order pairs along each segment and merge runs with equal layer
    o = np.lexsort((t0, seg))
    seg, t0, t1, layer = seg[o], t0[o], t1[o], layer[o]
    brk = np.ones(len(seg), dtype=bool)
    brk[1:] = (seg[1:] != seg[:-1]) | (layer[1:] != layer[:-1])
    starts = np.flatnonzero(brk)
    ends = np.concatenate([starts[1:], [len(seg)]]) - 1
    run_seg = seg[starts]
    run_t0 = t0[starts]
    run_t1 = t1[ends]
    run_layer = layer[starts]
    run_t0 = np.where(np.concatenate([[True], run_seg[1:] != run_seg[:-1]]), 0.0, run_t0)
    run_t1 = np.where(np.concatenate([run_seg[1:] != run_seg[:-1], [True]]), 1.0, run_t1)

    # excluded segments become label-0 runs so that every segment is covered
    dead = np.flatnonzero(nwedge == 0)
    run_seg = np.concatenate([run_seg, dead])
    run_t0 = np.concatenate([run_t0, np.zeros(len(dead))])
    run_t1 = np.concatenate([run_t1, np.ones(len(dead))])
    run_layer = np.concatenate([run_layer, np.zeros(len(dead), dtype=np.int64)])
    o = np.lexsort((run_t0, run_seg))
    run_seg, run_t0, run_t1, run_layer = run_seg[o], run_t0[o], run_t1[o], run_layer[o]

    pieces = []
    offset = 0
    run_owner = owner[run_seg]
    for ci, poly in enumerate(curve.components):
        sel = run_owner == ci
        for label, piece in split_runs(
            poly, run_seg[sel] - offset, run_t0[sel], run_t1[sel], run_layer[sel]
        ):
            pieces.append(LayerPiece(label, piece, 1 if label % 2 else -1))
        offset += poly.n_segments
    max_layer = max((p.layer_index for p in pieces), default=0)
    return LayerDecomposition(z, pieces, max_layer, diagnostics)


def split_components(curve):
    """Connected components of a CurveSet, one CurveSet each.

    Polylines joined end to end at exactly equal vertices are merged.
    """
    polys = [p.vertices for p in curve.components]
    if not polys:
        return []
    ends = [tuple(v[0]) for v in polys] + [tuple(v[-1]) for v in polys]
    merged = len(set(ends)) < len(ends)
    while merged:
        merged = False
        for i in range(len(polys)):
            for j in range(len(polys)):
                if i == j or polys[i] is None or polys[j] is None:
                    continue
                a, b = polys[i], polys[j]
                if _closed(a) or _closed(b):
                    continue
                joined = _join(a, b)
                if joined is not None:
                    polys[i] = joined
                    polys[j] = None
                    merged = True
    return [CurveSet([Polyline(p, validate=False)], validate=False) for p in polys if p is not None]


def _closed(v):
    return len(v) >= 4 and np.all(v[0] == v[-1])


def _join(a, b):
    if np.all(a[-1] == b[0]):
        return np.concatenate([a, b[1:]])
    if np.all(a[-1] == b[-1]):
        return np.concatenate([a, b[::-1][1:]])
    if np.all(a[0] == b[-1]):
        return np.concatenate([b, a[1:]])
    if np.all(a[0] == b[0]):
        return np.concatenate([b[::-1], a[1:]])
    return None


def decompose_full(curve, frame):
    """Layers, then half-plane parts, then connected components.

    Returns a list of DecomposedPiece; each piece is radial with respect to
    ``frame.z``, lies in one open half-plane and is connected.  ``sign`` is
    the alternating layer sign; the half-plane sign is applied later by the
    segment formula.
    """
    return decompose_with_diagnostics(curve, frame)[0]


def decompose_with_diagnostics(curve, frame):
    layers = radial_layers(curve, frame.z)
    out = []
    for n in range(1, layers.max_layer + 1):
        part = layers.layer(n)
        if part.is_empty():
            continue
        upper, lower = halfplane_clip(part, frame)
        sign = 1 if n % 2 else -1
        for side, half in ((1, upper), (-1, lower)):
            for comp in split_components(half):
                for poly in comp.components:
                    out.append(DecomposedPiece(sign, poly, n, side))
    return out, layers.diagnostics
