import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from nlcurve.errors import DegenerateCurveError, DomainError, InvalidParamsError, UnknownCurveError
from nlcurve.geometry import point_segment_distance
from nlcurve.spline import CATALOG_NAMES, ParametricCurve, catalog, interpolate, uniform_partition

CATALOG_EXAMPLES = [
    ("circle", [0, 0, 1]),
    ("arc", [0.5, -0.2, 2.0, 0.3, 2.5]),
    ("ellipse", [0, 0, 2, 1, 0.4]),
    ("graph_poly", [-1, 1, 0.2, -0.5, 1.0]),
    ("graph_sin", [0, math.pi, 1, 1]),
    ("spiral", [0.2, 0, 4 * math.pi]),
]


def chord_gap(curve, n, fine=64):
    """Largest distance from the curve to the chord of its own sub-arc."""
    res = interpolate(curve, n, validate=False)
    t = res.partition
    worst = 0.0
    for k in range(n):
        s = np.linspace(t[k], t[k + 1], fine)
        p = curve.eval(s)
        a, b = curve.eval([t[k], t[k + 1]])
        for q in p:
            worst = max(worst, point_segment_distance(q, a[None], b[None])[0][0])
    return worst


def test_square_from_circle():
    res = interpolate(catalog("circle", [0, 0, 1]), 4)
    expected = np.array([(1, 0), (0, 1), (-1, 0), (0, -1), (1, 0)], dtype=float)
    assert np.allclose(res.polyline.vertices, expected, atol=1e-15)
    assert res.polyline.closed


@pytest.mark.parametrize("n", [1, 3, 17, 100])
def test_line_is_reproduced(n):
    line = ParametricCurve(lambda t: np.stack([1 + 2 * t, -t], axis=1), 0.0, 1.0)
    res = interpolate(line, n)
    V = res.polyline.vertices
    assert np.allclose(V[0], [1, 0]) and np.allclose(V[-1], [3, -1])
    assert res.polyline.length == pytest.approx(math.sqrt(5), rel=1e-14)
    d = point_segment_distance(V[len(V) // 2], V[:1], V[-1:])[0][0]
    assert d <= 1e-15


@pytest.mark.parametrize("n", [4, 8, 16, 64, 256])
def test_circle_sagitta(n):
    res = interpolate(catalog("circle", [0, 0, 1]), n)
    V = res.polyline.vertices
    mids = 0.5 * (V[:-1] + V[1:])
    gap = 1 - np.hypot(*mids.T).min()
    assert gap == pytest.approx(1 - math.cos(math.pi / n), rel=1e-9, abs=1e-15)


@pytest.mark.parametrize("name,params", CATALOG_EXAMPLES)
def test_vertices_are_samples_bit_exact(name, params):
    c = catalog(name, params)
    res = interpolate(c, 37)
    t = uniform_partition(c.alpha, c.beta, 37)
    assert np.array_equal(res.partition, t)
    samples = c.eval(t)
    if c.closed:
        samples[-1] = samples[0]
    assert np.array_equal(res.polyline.vertices, samples)


@pytest.mark.parametrize("name,params", CATALOG_EXAMPLES)
def test_refinement_gap_nonincreasing(name, params):
    c = catalog(name, params)
    gaps = [chord_gap(c, n) for n in (8, 16, 32, 64, 128)]
    assert all(b <= a + 1e-15 for a, b in zip(gaps, gaps[1:]))


def test_partition_uniform():
    t = uniform_partition(-1.0, 2.0, 6)
    assert t[0] == -1.0 and t[-1] == 2.0
    assert np.allclose(np.diff(t), 0.5)


def test_catalog_examples():
    c = catalog("circle", [0, 0, 1])
    assert (c.alpha, c.beta, c.closed) == (0.0, 2 * math.pi, True)
    g = catalog("graph_sin", [0, math.pi, 1, 1])
    t = np.linspace(0, math.pi, 9)
    assert np.allclose(g.eval(t), np.column_stack([t, np.sin(t)]), atol=0)
    s = catalog("spiral", [0.2, 0, 4 * math.pi])
    p = s.eval([2 * math.pi, 4 * math.pi])
    assert np.allclose(p, [[0.4 * math.pi, 0], [0.8 * math.pi, 0]], atol=1e-14)
    assert set(CATALOG_NAMES) == {"circle", "arc", "ellipse", "graph_poly", "graph_sin", "spiral"}


def test_catalog_errors():
    with pytest.raises(UnknownCurveError):
        catalog("cardioid", [1])
    with pytest.raises(InvalidParamsError):
        catalog("circle", [0, 0])
    with pytest.raises(InvalidParamsError):
        catalog("circle", [0, 0, -1])
    with pytest.raises(InvalidParamsError):
        catalog("graph_sin", [1, 0, 1, 1])


def test_degenerate_and_domain():
    const = ParametricCurve(lambda t: np.zeros((len(t), 2)), 0.0, 1.0)
    with pytest.raises(DegenerateCurveError):
        interpolate(const, 8)
    with pytest.raises(DomainError):
        interpolate(catalog("circle", [0, 0, 1]), 0)
    with pytest.raises(DomainError):
        ParametricCurve(lambda t: t, 1.0, 1.0)


def test_sample_table_density():
    t = np.linspace(0, 1, 81)
    table = ParametricCurve.from_samples(t, np.column_stack([t, t**2]))
    assert interpolate(table, 10).polyline.n_segments == 10
    with pytest.raises(DomainError):
        interpolate(table, 11)


@settings(max_examples=30)
@given(st.floats(0.01, 1.0), st.floats(0.5, 2.0), st.integers(8, 200))
def test_curve_continuity_spot_check(h, amp, n):
    g = catalog("graph_sin", [0, 3, amp, 2])
    t = np.linspace(0, 3 - h, n)
    jump = np.hypot(*(g.eval(t + h * 1e-6) - g.eval(t)).T).max()
    assert jump <= (1 + 2 * amp) * h * 1e-6 + 1e-12
