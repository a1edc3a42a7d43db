import math

import numpy as np
import pytest
from conftest import FIG4_PIECES, FIG4_SIGNS, spiral, square, star
from hypothesis import given, settings
from hypothesis import strategies as st

from nlcurve.errors import InvalidNormalError
from nlcurve.geometry import CurveSet, Frame, Polyline, halfplane_clip
from nlcurve.oracle import OracleOptions, kappa_oracle
from nlcurve.pipeline import PipelineOptions, kappa_parametric, kappa_polyline, remove_disk
from nlcurve.spline import ParametricCurve, catalog

UP = Frame.make((0, 0), (0, 1))


def random_frame(rng, spread=0.1):
    th = rng.uniform(0, 2 * math.pi)
    return Frame.make(rng.uniform(-spread, spread, 2), (math.cos(th), math.sin(th)))


def test_empty_curve_is_exactly_zero():
    rep = kappa_polyline(CurveSet(), UP, 0.5)
    assert rep.value == 0.0 and rep.per_piece == []


@pytest.mark.parametrize("rho", [0.5, 0.1, 0.01, 1e-4])
def test_midpoint_of_segment_is_zero(rho):
    c = CurveSet([Polyline([(-1, 0), (1, 0)])])
    rep = kappa_polyline(c, UP, 0.5, PipelineOptions(rho=rho))
    assert rep.value == 0.0
    assert rep.removed_disk == rho


def test_z_on_extension_is_exactly_zero():
    c = CurveSet([Polyline([(1, 1), (3, 2)])])
    fr = Frame.make((-1, 0), (0.2, 1))
    assert kappa_polyline(c, fr, 0.7).value == 0.0


def test_fig4_signed_sum(fig4):
    names, c = fig4
    rep = kappa_polyline(c, UP, 0.5)
    alone = {k: kappa_polyline(CurveSet([Polyline(FIG4_PIECES[k])]), UP, 0.5).value for k in names}
    expected = math.fsum(FIG4_SIGNS[k] * alone[k] for k in names)
    assert abs(rep.value - expected) <= 1e-12 * max(1.0, abs(expected))
    assert abs(rep.value - rep.signed_sum()) <= 1e-12
    assert sorted(p.sign for p in rep.per_piece) == [-1, 1, 1, 1, 1, 1]


@pytest.mark.parametrize("seed", range(6))
def test_halfplane_additivity(seed):
    rng = np.random.default_rng(seed)
    c = CurveSet([star(rng, k=11)]) if seed % 2 else spiral(c=0.1 + 0.03 * seed, n=150)
    fr = random_frame(rng)
    up, lo = halfplane_clip(c, fr)
    whole = kappa_polyline(c, fr, 0.5).value
    parts = kappa_polyline(up, fr, 0.5).value + kappa_polyline(lo, fr, 0.5).value
    assert abs(whole - parts) <= 1e-10 * max(1.0, abs(whole))


@pytest.mark.parametrize("seed", range(10))
def test_radial_disjoint_additivity(seed):
    rng = np.random.default_rng(100 + seed)
    poly = star(rng, k=12, center=(0.05, -0.02))
    V = poly.vertices
    cuts = np.sort(rng.choice(np.arange(1, len(V) - 1), size=3, replace=False))
    bounds = [0, *cuts, len(V) - 1]
    pieces = [Polyline(V[a : b + 1]) for a, b in zip(bounds, bounds[1:])]
    fr = random_frame(rng, spread=0.02)
    whole = kappa_polyline(CurveSet([poly]), fr, 0.4).value
    parts = math.fsum(kappa_polyline(CurveSet([p]), fr, 0.4).value for p in pieces)
    assert abs(whole - parts) <= 1e-10 * max(1.0, abs(whole))


@pytest.mark.parametrize("z", [(0.0, 0.0), (0.07, -0.04)])
def test_two_turn_spiral_matches_oracle(z):
    c = spiral()
    fr = Frame.make(z, (0.3, 1.0))
    rep = kappa_polyline(c, fr, 0.5)
    if z == (0.0, 0.0):
        assert {p.layer for p in rep.per_piece} == {1, 2}
    ref = kappa_oracle(c, fr, 0.5, OracleOptions(theta_tolerance=1e-10))
    assert abs(rep.value - ref) <= 1e-8


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 10**6))
def test_u_antisymmetry_end_to_end(seed):
    rng = np.random.default_rng(seed)
    c = CurveSet([star(rng, k=7, center=(0.1, 0.1)), square(3.0)])
    fr = random_frame(rng)
    a = kappa_polyline(c, fr, 0.5).value
    b = kappa_polyline(c, Frame.make(fr.z, -fr.u), 0.5).value
    assert abs(a + b) <= 1e-12 * max(1.0, abs(a))


@settings(max_examples=25, deadline=None)
@given(st.integers(0, 10**6))
def test_isometry_end_to_end(seed):
    rng = np.random.default_rng(seed)
    c = spiral(c=0.2, n=80)
    fr = random_frame(rng)
    rot = rng.uniform(0, 2 * math.pi)
    R = np.array([[math.cos(rot), -math.sin(rot)], [math.sin(rot), math.cos(rot)]])
    shift = rng.uniform(-5, 5, 2)
    moved = CurveSet([Polyline(c.components[0].vertices @ R.T + shift)])
    a = kappa_polyline(c, fr, 0.6).value
    b = kappa_polyline(moved, Frame.make(R @ fr.z + shift, R @ fr.u), 0.6).value
    assert abs(a - b) <= 1e-10 * max(1.0, abs(a))


def test_invalid_normal():
    c = CurveSet([Polyline([(-1, 0), (1, 0)])])
    with pytest.raises(InvalidNormalError):
        kappa_polyline(c, Frame.make((0, 0), (1, 1)), 0.5)
    with pytest.raises(InvalidNormalError):
        kappa_parametric(catalog("circle", [0, 0, 1]), Frame.make((1, 0), (1, 1)), 0.5)


def test_vertex_normal_uses_averaged_tangent():
    c = CurveSet([Polyline([(-1, -1), (0, 0), (1, -1)])])
    rep = kappa_polyline(c, Frame.make((0, 0), (0, 1)), 0.5, PipelineOptions(rho=0.1))
    assert rep.removed_disk == 0.1
    with pytest.raises(InvalidNormalError):
        kappa_polyline(c, Frame.make((0, 0), (1, 0)), 0.5)


def test_remove_disk_lengths():
    c = CurveSet([Polyline([(-1, 0), (1, 0), (1, 1)])])
    out = remove_disk(c, (0, 0), 0.25)
    assert out.length == pytest.approx(c.length - 0.5, rel=1e-14)
    assert all(np.min(np.hypot(*p.vertices.T)) >= 0.25 - 1e-15 for p in out.components)


def test_report_records_spline_n_and_sum():
    rep = kappa_parametric([catalog("ellipse", [0, 0, 2, 1])], Frame.make((0.3, 0.1), (0, 1)), 0.5, PipelineOptions(spline_n=64))
    assert rep.spline_n == 64
    assert abs(rep.value - rep.signed_sum()) <= 1e-12


def test_holder_warning():
    curve = catalog("circle", [0, 0, 1])
    rough = ParametricCurve(curve.func, curve.alpha, curve.beta, 0.4, True)
    with pytest.warns(RuntimeWarning, match="Hoelder"):
        rep = kappa_parametric(rough, UP, 0.5, PipelineOptions(spline_n=32))
    assert any("Hoelder" in w for w in rep.warnings)


def test_circle_centre_converges_to_zero():
    c = catalog("circle", [0, 0, 1])
    for n in (16, 64, 256):
        assert abs(kappa_parametric(c, UP, 0.5, PipelineOptions(spline_n=n)).value) <= 1e-12


def test_circle_off_centre_differences_decrease():
    c = catalog("circle", [0, 0, 1])
    fr = Frame.make((0.3, 0.1), (0, 1))
    vals = [kappa_parametric(c, fr, 0.5, PipelineOptions(spline_n=n)).value for n in (16, 32, 64, 128, 256)]
    diffs = np.abs(np.diff(vals))
    assert np.all(np.diff(diffs) < 0)


def test_graph_sin_against_oracle():
    g = catalog("graph_sin", [0, math.pi, 1, 1])
    fr = Frame.make((1.5, -2.0), (0, 1))
    rep = kappa_parametric(g, fr, 0.5, PipelineOptions(spline_n=512))
    ref = kappa_oracle(g, fr, 0.5)
    assert abs(rep.value - ref) <= 1e-4


def test_disk_removal_trend_on_smooth_curve():
    c = catalog("ellipse", [0, 0, 2, 1])
    fr = Frame.make((2, 0), (1, 0))
    vals = [kappa_parametric(c, fr, 0.5, PipelineOptions(spline_n=8192, rho=r)).value for r in (0.1, 0.05, 0.025, 0.0125)]
    diffs = np.abs(np.diff(vals))
    assert np.all(np.diff(diffs) < 0)


def test_mixed_spline_and_polyline():
    c = catalog("circle", [0, 0, 1])
    box = Polyline([(-3, -3), (3, -3), (3, 3), (-3, 3), (-3, -3)])
    fr = Frame.make((0.2, 0.1), (0, 1))
    rep = kappa_parametric([c], fr, 0.5, PipelineOptions(spline_n=256), extra=[box])
    alone = kappa_parametric([c], fr, 0.5, PipelineOptions(spline_n=256)).value
    box_alone = kappa_polyline(CurveSet([box]), fr, 0.5).value
    # the box is a second layer, so it enters with the opposite sign
    assert rep.value == pytest.approx(alone - box_alone, abs=1e-12)
