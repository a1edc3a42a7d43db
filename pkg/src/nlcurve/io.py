"""Curve spec files (JSON) and table emission (text, CSV, JSON)."""

import csv
import io
import json

import numpy as np

from .errors import DomainError, GeometryError
from .geometry import CurveSet, Polyline
from .spline import ParametricCurve, catalog


class SpecError(ValueError):
    """A curve spec file is malformed."""


class CurveSpec:
    """Parsed curve spec: exact polylines plus catalog curves."""

    def __init__(self, polylines, curves, holder_exponent=None):
        self.polylines = list(polylines)
        self.curves = list(curves)
        self.holder_exponent = holder_exponent

    @property
    def has_smooth(self):
        return bool(self.curves)

    def oracle_curves(self):
        """Everything in a form the oracle accepts."""
        out = list(self.curves)
        if self.polylines:
            out.append(CurveSet(self.polylines, validate=False))
        return out


def parse_spec(text):
    """Parse a JSON curve spec.

    Raises
    ------
    SpecError
        On malformed JSON (with line and column) or invalid content.
    """
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise SpecError(f"malformed JSON at line {exc.lineno}, column {exc.colno}: {exc.msg}") from exc
    if not isinstance(doc, dict) or "components" not in doc:
        raise SpecError("spec must be an object with a 'components' list")
    comps = doc["components"]
    if not isinstance(comps, list) or not comps:
        raise SpecError("spec needs at least one component")
    holder = doc.get("holder_exponent")
    if holder is not None:
        if not isinstance(holder, (int, float)) or not 0 < holder <= 1:
            raise SpecError("holder_exponent must be a number in (0, 1]")
        holder = float(holder)
    polylines, curves = [], []
    for k, c in enumerate(comps):
        if not isinstance(c, dict):
            raise SpecError(f"component {k} must be an object")
        kind = c.get("type")
        if kind == "polyline":
            pts = c.get("points")
            if not isinstance(pts, list) or len(pts) < 2:
                raise SpecError(f"component {k}: a polyline needs at least 2 points")
            try:
                polylines.append(Polyline(np.array(pts, dtype=float)))
            except (GeometryError, ValueError) as exc:
                raise SpecError(f"component {k}: {exc}") from exc
        elif kind == "catalog":
            try:
                curve = catalog(c.get("name"), c.get("params", []))
            except (ValueError, TypeError) as exc:
                raise SpecError(f"component {k}: {exc}") from exc
            if holder is not None:
                curve = ParametricCurve(
                    curve.func, curve.alpha, curve.beta, holder, curve.closed, curve.name, curve.params
                )
            curves.append(curve)
        else:
            raise SpecError(f"component {k}: unknown type {kind!r}")
    if len(polylines) > 1:
        try:
            CurveSet(polylines)
        except GeometryError as exc:
            raise SpecError(f"polylines are not disjoint: {exc}") from exc
    return CurveSpec(polylines, curves, holder)


def load_spec(path):
    with open(path, encoding="utf-8") as fh:
        return parse_spec(fh.read())


def curveset_to_json(curve):
    """Spec text for a CurveSet; floats survive the round trip bit for bit."""
    comps = [{"type": "polyline", "points": p.vertices.tolist()} for p in curve.components]
    return json.dumps({"components": comps}, indent=1)


def parse_pair(text, name):
    try:
        parts = [float(v) for v in text.split(",")]
    except ValueError as exc:
        raise DomainError(f"{name} must be two comma-separated numbers, got {text!r}") from exc
    if len(parts) != 2 or not all(np.isfinite(parts)):
        raise DomainError(f"{name} must be two finite comma-separated numbers, got {text!r}")
    return np.array(parts)


def parse_list(text, name, kind=float):
    try:
        vals = [kind(v) for v in text.split(",") if v.strip()]
    except ValueError as exc:
        raise DomainError(f"{name} must be a comma-separated list, got {text!r}") from exc
    if not vals:
        raise DomainError(f"{name} must not be empty")
    return vals


def fmt(x):
    if x is None:
        return ""
    if isinstance(x, str):
        return x
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    return repr(float(x))


def render(columns, rows, style, meta=None):
    """Render a table as text, CSV or JSON."""
    meta = meta or {}
    if style == "json":
        doc = dict(meta)
        doc["rows"] = [dict(zip(columns, r)) for r in rows]
        return json.dumps(doc, indent=1, default=float) + "\n"
    if style == "csv":
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(columns)
        for r in rows:
            w.writerow([fmt(v) for v in r])
        return buf.getvalue()
    lines = [f"{k}: {v}" for k, v in meta.items()]
    cells = [[str(c) for c in columns]] + [[fmt(v) for v in r] for r in rows]
    widths = [max(len(row[i]) for row in cells) for i in range(len(columns))]
    for row in cells:
        lines.append("  ".join(c.rjust(w) for c, w in zip(row, widths)))
    return "\n".join(lines) + "\n"
