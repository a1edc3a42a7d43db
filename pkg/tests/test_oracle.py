import math

import numpy as np
import pytest
from conftest import spiral, square, star

from nlcurve.decompose import decompose_full
from nlcurve.errors import NotRadialError
from nlcurve.geometry import CurveSet, Frame, Polyline, Segment
from nlcurve.oracle import (
    OracleOptions,
    integrate_piecewise_constant,
    kappa_oracle,
    kappa_radial_oracle,
    ray_profile,
)
from nlcurve.segment import kappa_segment
from nlcurve.spline import catalog

UP = Frame.make((0, 0), (0, 1))
# on-curve unit circle with outward normal, from the beta-function closed form
CIRCLE_ON = {0.5: -7.41629870920548767, 0.9: -12.7144779600919072, 0.99: -102.415968237464174}


def test_piecewise_constant_single_crossing():
    prof = integrate_piecewise_constant([2.0], [0.0, 1.0], 0.5)
    assert prof.head == 0.0
    assert prof.regular == pytest.approx(2.0**-0.5 / 0.5, rel=1e-15)


def test_piecewise_constant_two_crossings_dense_check():
    quad = pytest.importorskip("scipy.integrate").quad
    r1, r2, s = 1.0, 2.5, 0.4
    prof = integrate_piecewise_constant([r1, r2], [0.0, 1.0, 0.0], s)
    assert prof.regular == pytest.approx((r1**-s - r2**-s) / s, rel=1e-15)
    dense, _ = quad(lambda r: r ** (-1 - s), r1, r2, epsabs=1e-14, epsrel=1e-14)
    assert prof.regular == pytest.approx(dense, rel=1e-12)


def test_piecewise_constant_validation():
    with pytest.raises(ValueError):
        integrate_piecewise_constant([2.0, 1.0], [0, 1, 0], 0.5)
    with pytest.raises(ValueError):
        integrate_piecewise_constant([1.0], [0.0], 0.5)


def test_ray_profile_head_and_tail():
    c = CurveSet([Polyline([(-1, 1), (1, 1)])])
    up = ray_profile(c, UP, math.pi / 2, 0.5)
    assert up.head == -1.0  # exterior near z on upward rays
    assert up.regular == pytest.approx(4.0, rel=1e-14)  # jump of 2 at r = 1, times 1/sigma
    miss = ray_profile(c, UP, 0.1, 0.5)
    assert (miss.head, miss.regular) == (-1.0, 0.0)
    down = ray_profile(c, UP, -math.pi / 2, 0.5)
    assert (down.head, down.regular) == (1.0, 0.0)


def test_concentric_squares_profile():
    c = CurveSet([square(1), square(2)])
    prof = ray_profile(c, UP, 0.3, 0.5)
    r1, r2 = 1 / math.cos(0.3), 2 / math.cos(0.3)
    assert prof.regular == pytest.approx(2 * (r1**-0.5 - r2**-0.5) / 0.5, rel=1e-13)


def test_empty_curve_is_zero():
    assert kappa_oracle(CurveSet(), UP, 0.5) == 0.0


def test_long_segment_through_z_is_zero():
    c = CurveSet([Polyline([(-50, 0), (50, 0)])])
    assert abs(kappa_oracle(c, UP, 0.5)) <= 1e-10


@pytest.mark.parametrize("sigma", [0.5, 0.9, 0.99])
def test_on_curve_circle_closed_form(sigma):
    val = kappa_oracle(catalog("circle", [0, 0, 1]), Frame.make((1, 0), (1, 0)), sigma)
    assert val == pytest.approx(CIRCLE_ON[sigma], rel=1e-10)


def test_centred_circle_is_zero():
    assert abs(kappa_oracle(catalog("circle", [0, 0, 1]), UP, 0.5)) <= 1e-12


@pytest.mark.parametrize("R,sigma", [(1.0, 0.5), (2.5, 0.3), (0.4, 0.8)])
def test_quarter_arc(R, sigma):
    arc = catalog("arc", [0, 0, R, math.pi / 4, 3 * math.pi / 4])
    expected = (math.pi / 2) * R**-sigma / sigma
    assert kappa_oracle(arc, UP, sigma) == pytest.approx(expected, rel=1e-10)


def test_radial_oracle_examples():
    seg = Polyline([(-1, 1), (1, 1)])
    exact = kappa_segment(Segment((-1, 1), (1, 1)), UP, 0.5)
    assert kappa_radial_oracle(seg, UP, 0.5) == pytest.approx(exact, rel=1e-10)
    assert kappa_radial_oracle(Polyline([(1, 1), (3, 3)]), UP, 0.5) == 0.0
    low = Polyline([(-1, -2), (2, -1)])
    exact = kappa_segment(Segment((-1, -2), (2, -1)), UP, 0.5)
    assert kappa_radial_oracle(low, UP, 0.5) == pytest.approx(exact, rel=1e-10)
    with pytest.raises(NotRadialError):
        kappa_radial_oracle(Polyline([(1, 1), (3, 1), (3, 3), (1, 3)]), UP, 0.5)


@pytest.mark.parametrize("seed", range(4))
def test_oracle_equals_sum_of_radial_pieces(seed):
    rng = np.random.default_rng(seed)
    c = spiral(c=0.2, n=60) if seed % 2 == 0 else CurveSet([star(rng, k=6), square(3)])
    th = rng.uniform(0, 2 * math.pi)
    fr = Frame.make(rng.uniform(-0.05, 0.05, 2), (math.cos(th), math.sin(th)))
    opts = OracleOptions(theta_tolerance=1e-10)
    whole = kappa_oracle(c, fr, 0.5, opts)
    parts = sum(p.sign * kappa_radial_oracle(p.piece, fr, 0.5, opts) for p in decompose_full(c, fr))
    assert abs(whole - parts) <= 2 * opts.theta_tolerance * max(1.0, len(decompose_full(c, fr)))


def test_segment_matches_closed_form_random():
    rng = np.random.default_rng(5)
    worst = 0.0
    for _ in range(40):
        a, b, z = rng.uniform(-3, 3, (3, 2))
        th = rng.uniform(0, 2 * math.pi)
        fr = Frame.make(z, (math.cos(th), math.sin(th)))
        ref = kappa_oracle(CurveSet([Polyline([a, b])]), fr, 0.25)
        worst = max(worst, abs(ref - kappa_segment(Segment(a, b), fr, 0.25)) / max(1.0, abs(ref)))
    assert worst <= 1e-9


def test_seed_invariance():
    # a radial segment along the x axis forces ray nudges at the quarter boundaries
    c = CurveSet([Polyline([(0.5, 0.0), (2.0, 0.0), (2.0, 1.0), (-1.0, 2.0)])])
    a = kappa_oracle(c, UP, 0.5, OracleOptions(perturbation_seed=0))
    b = kappa_oracle(c, UP, 0.5, OracleOptions(perturbation_seed=1))
    assert abs(a - b) <= 1e-9


def test_pv_heads_cancel_on_smooth_curve():
    g = catalog("graph_sin", [0, math.pi, 1, 1])
    x = 1.0
    p = (x, math.sin(x))
    n = (-math.cos(x), 1.0)
    res = kappa_oracle(g, Frame.make(p, n), 0.5, OracleOptions(theta_tolerance=1e-6), details=True)
    assert res.on_curve
    assert res.max_head_mismatch <= 1e-10


def test_tolerance_refinement():
    c = catalog("circle", [0, 0, 1])
    fr = Frame.make((0.99, 0.05), (0.3, 1.0))
    ref = kappa_oracle(c, fr, 0.5, OracleOptions(theta_tolerance=1e-13))
    devs = []
    for tol in (1e-2, 5e-3, 2.5e-3, 1.25e-3):
        dev = abs(kappa_oracle(c, fr, 0.5, OracleOptions(theta_tolerance=tol)) - ref)
        assert dev <= tol
        devs.append(dev)
    assert all(b <= a for a, b in zip(devs, devs[1:]))
