import numpy as np
import pytest

from nlcurve.geometry import CurveSet, Polyline

# six disjoint pieces around z = 0, u = (0, 1): Q2, Q3, Q4 are stacked so that
# rays through Q4 cross Q2 and Q3 first; Q6 sits below the dividing line
FIG4_PIECES = {
    "Q1": [(1.2, 1.5), (1.7, 1.1), (2.0, 0.5)],
    "Q2": [(-0.5, 1.0), (0.0, 1.1), (0.5, 1.0)],
    "Q3": [(-0.8, 2.0), (0.0, 2.2), (0.8, 2.0)],
    "Q4": [(-0.9, 3.0), (0.0, 3.1), (0.9, 3.0)],
    "Q5": [(-2.0, 0.5), (-1.7, 1.1), (-1.2, 1.5)],
    "Q6": [(-1.0, -1.0), (0.0, -1.3), (1.0, -1.2)],
}
FIG4_SIGNS = {"Q1": 1, "Q2": 1, "Q3": -1, "Q4": 1, "Q5": 1, "Q6": 1}


@pytest.fixture
def fig4():
    names = list(FIG4_PIECES)
    return names, CurveSet([Polyline(FIG4_PIECES[k]) for k in names])


def spiral(c=0.2, t0=np.pi, t1=5 * np.pi, n=400, center=(0.0, 0.0)):
    t = np.linspace(t0, t1, n)
    r = c * t
    return CurveSet([Polyline(np.column_stack([center[0] + r * np.cos(t), center[1] + r * np.sin(t)]))])


def square(h, center=(0.0, 0.0)):
    cx, cy = center
    return Polyline([(cx - h, cy - h), (cx + h, cy - h), (cx + h, cy + h), (cx - h, cy + h), (cx - h, cy - h)])


def star(rng, k=9, center=(0.0, 0.0)):
    """Random closed polygon, star-shaped around its centre."""
    # jittered equal spacing keeps every angular gap below pi
    th = (np.arange(k) + rng.uniform(-0.4, 0.4, k)) * (2 * np.pi / k)
    r = rng.uniform(0.5, 2.0, k)
    pts = np.column_stack([center[0] + r * np.cos(th), center[1] + r * np.sin(th)])
    return Polyline(np.vstack([pts, pts[:1]]))
