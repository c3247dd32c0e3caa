import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from rathull.errors import ChartMismatch, InvalidParams, NotOnGamma, SingularFiber, ValidationFailed
from rathull.fibration import (
    HYPOTHESIS_NOTICE,
    INTERIOR,
    MAP_2ZW,
    MAP_W2_OVER_Z,
    MAP_Z,
    PUNCTURE,
    V_Z,
    AvoidanceCurve,
    PlanarChart,
    ChartMap,
    bounded_components,
    fiber_solve,
    gamma_curve,
    hull_decompose,
    variety_chart,
)
from rathull.poly import W, linear
from rathull.surfaces import HopfTorus, KleinBottle, KleinStar, SpinTorus, TotallyRealDisc, validate_family

K = KleinBottle(2.0, 1.0)


def test_gamma_examples():
    g = gamma_curve(K, MAP_W2_OVER_Z, 2048)
    assert g.closure_gap < 1e-15
    assert g.simple
    assert abs(K.h(-math.pi / 2) ** 2 - 1) < 1e-15


def test_gamma_simplicity_matches_pair_scan():
    # independent oracle: all pairwise distances of well separated samples
    phi = np.linspace(-math.pi, 0, 1024, endpoint=False)
    t = K.h(phi) ** 2
    D = np.abs(t[:, None] - t[None, :])
    i = np.arange(t.size)
    sep = np.abs(i[:, None] - i[None, :])
    sep = np.minimum(sep, t.size - sep)
    assert D[sep >= 16].min() > 1e-3


def test_gamma_records_double_point_for_spin_and_disc():
    for fam in (SpinTorus(), TotallyRealDisc()):
        g = gamma_curve(fam, samples=1024)
        assert len(g.crossings) == 1 and not g.simple


def test_map_must_match_family():
    with pytest.raises(InvalidParams):
        gamma_curve(K, MAP_Z)


def test_klein_zero_fiber():
    sol = fiber_solve(K, MAP_W2_OVER_Z, 0)
    assert sol.params == [-math.pi, 0.0]
    assert [c.chart_radius for c in sol.circles] == [1.0, 9.0]


def test_klein_fiber_at_one():
    sol = fiber_solve(K, MAP_W2_OVER_Z, 1)
    assert len(sol.circles) == 1
    c = sol.circles[0]
    assert abs(c.param + math.pi / 2) < 1e-12
    theta, z, w = c.samples(32)
    assert np.max(np.abs(z - 4 * np.exp(2j * theta))) < 1e-12
    assert np.max(np.abs(w + 2 * np.exp(1j * theta))) < 1e-12


def test_off_gamma_fiber_is_empty_or_raises():
    assert fiber_solve(K, MAP_W2_OVER_Z, 5 + 5j).circles == []
    with pytest.raises(NotOnGamma):
        fiber_solve(K, MAP_W2_OVER_Z, 5 + 5j, strict=True)


@settings(max_examples=40, deadline=None)
@given(st.floats(-math.pi + 0.01, -0.01))
def test_fiber_circles_lie_on_variety(phi):
    t = complex(K.h(phi) ** 2)
    sol = fiber_solve(K, MAP_W2_OVER_Z, t)
    assert sol.circles
    for c in sol.circles:
        _, z, w = c.samples(64)
        assert np.max(MAP_W2_OVER_Z.fiber_residual(z, w, t)) < 1e-9


@settings(max_examples=40, deadline=None)
@given(st.floats(-math.pi + 0.01, -0.01))
def test_fibering_is_theta_independent(phi):
    theta = np.linspace(0, 2 * math.pi, 17)
    z, w = K.evaluate(theta, phi)
    assert np.max(np.abs(MAP_W2_OVER_Z(z, w) - K.h(phi) ** 2)) < 1e-12


@settings(max_examples=40, deadline=None)
@given(st.floats(-math.pi + 0.01, -0.01))
def test_conjugate_fiber_is_the_mirror_circle(phi):
    # conj h(phi)^2 = h(-pi - phi)^2, so conj(t) picks the circle at -pi - phi,
    # whose radius uses a - b cos(phi) in place of a + b cos(phi)
    t = complex(K.h(phi) ** 2)
    a = fiber_solve(K, None, t).circles[0]
    b = fiber_solve(K, None, t.conjugate()).circles[0]
    assert abs(b.param - (-math.pi - phi)) < 1e-8
    assert abs(a.chart_radius - K.g(phi) * abs(K.h(phi))) < 1e-9
    assert abs(b.chart_radius - (2 - math.cos(phi)) * abs(K.h(phi))) < 1e-9


def test_circles_at_phi_and_minus_phi_coincide():
    z1, w1 = K.evaluate(np.linspace(0, 2 * math.pi, 64, endpoint=False), 0.7)
    z2, w2 = K.evaluate(np.linspace(0, 2 * math.pi, 64, endpoint=False) + math.pi, -0.7)
    assert np.max(np.abs(z1 - z2)) < 1e-13 and np.max(np.abs(w1 - w2)) < 1e-13


def test_variety_charts():
    c1 = variety_chart(K, None, 1)
    assert c1.coordinate == "w" and c1.origin_status == INTERIOR and c1.v_locus == (0j,)
    c0 = variety_chart(K, None, 0)
    assert c0.coordinate == "z" and "multiplicity two" in c0.multiplicity_note
    ch = variety_chart(HopfTorus(), MAP_2ZW, 0.5)
    assert ch.origin_status == PUNCTURE and ch.v_locus == ()
    # u -> 0 sends w = t/(2u) to infinity
    z, w = ch.chart_map(np.array([1e-8]))
    assert abs(w[0]) > 1e6
    cs = variety_chart(SpinTorus(), None, 0.3)
    assert cs.coordinate == "w" and cs.v_locus == (0j,)


def test_singular_fibers():
    with pytest.raises(SingularFiber):
        variety_chart(TotallyRealDisc(), None, 0)
    with pytest.raises(SingularFiber):
        variety_chart(HopfTorus(), None, 0)


def test_disc_v_locus_is_outside_every_fiber_circle():
    ch = variety_chart(TotallyRealDisc(), None, 0.2)
    assert ch.v_locus == (2 + 0j,)


def test_bounded_components_klein_zero():
    inv = bounded_components(variety_chart(K, None, 0), [1.0, 9.0])
    assert [c.kind for c in inv.components] == ["disc", "annulus", "outer"]
    assert inv.excluded[0].kind == "disc"
    assert [(c.inner, c.outer) for c in inv.attached] == [(1.0, 9.0)]


def test_bounded_components_single_radius():
    inv = bounded_components(variety_chart(K, None, 1), [2.0])
    assert inv.attached == [] and len(inv.excluded) == 1
    inv = bounded_components(variety_chart(HopfTorus(), None, 0.5), [0.7])
    assert inv.bounded == []


def test_bounded_components_merges_close_radii():
    inv = bounded_components(variety_chart(K, None, 0), [1.0, 1.0 + 1e-12, 9.0])
    assert len(inv.components) == 3


def test_avoidance_through_origin_of_punctured_chart_is_not_seen():
    # V = {w = 0} never meets {2zw = t}, t != 0
    ch = variety_chart(HopfTorus(), None, 0.5, AvoidanceCurve(W, "w = 0"))
    assert ch.v_locus == ()


def test_klein_decomposition():
    d = hull_decompose(K, MAP_W2_OVER_Z, V_Z, resolution=1024)
    assert len(d.attached) == 1
    a = d.attached[0]
    assert a.t == 0 and a.kind == "annulus"
    assert abs(a.inner_radius - 1) < 1e-12 and abs(a.outer_radius - 9) < 1e-12
    z, w = a.sample()
    assert np.max(np.abs(w)) == 0
    assert 1 - 1e-12 <= np.min(np.abs(z)) and np.max(np.abs(z)) <= 9 + 1e-12
    assert sum(r.attached for r in d.fibers if r.t != 0) == 0
    assert d.min_abs_F_on_attached >= 1 - 1e-12
    assert d.hypothesis == HYPOTHESIS_NOTICE


def test_klein_decomposition_stable_under_doubling():
    a = hull_decompose(K, resolution=256).attached[0]
    b = hull_decompose(K, resolution=512).attached[0]
    assert abs(a.inner_radius - b.inner_radius) < 1e-12 and abs(a.outer_radius - b.outer_radius) < 1e-12


def test_klein_star_has_same_annulus():
    d = hull_decompose(KleinStar(), resolution=256)
    assert [(a.inner_radius, a.outer_radius) for a in d.attached] == [(1.0, 9.0)]


def test_hopf_decomposition_latitudes():
    fam = HopfTorus()
    rep = validate_family(fam)
    d = hull_decompose(fam, resolution=512, validation=rep)
    assert len(d.attached) == 1
    a = d.attached[0]
    assert abs(a.t - rep.constants["a"]) < 1e-10
    bound = math.sqrt(1 - abs(rep.constants["a"]) ** 2)
    lo, hi = sorted(a.latitude_bounds())
    assert abs(lo + bound) < 1e-9 and abs(hi - bound) < 1e-9
    assert sum(r.attached for r in d.fibers if abs(r.t - a.t) > 1e-9) == 0


def test_spin_decomposition_radii():
    fam = SpinTorus()
    rep = validate_family(fam)
    d = hull_decompose(fam, resolution=512, validation=rep)
    assert len(d.attached) == 1
    a = d.attached[0]
    c = rep.constants
    assert abs(a.inner_radius - min(c["r1"], c["r2"])) < 1e-9
    assert abs(a.outer_radius - max(c["r1"], c["r2"])) < 1e-9
    z, _ = a.sample()
    assert np.max(np.abs(z - c["z0"])) < 1e-12


def test_disc_decomposition_radii():
    fam = TotallyRealDisc()
    rep = validate_family(fam)
    d = hull_decompose(fam, resolution=512, validation=rep)
    assert len(d.attached) == 1
    a = d.attached[0]
    assert abs(a.inner_radius - math.sqrt(rep.constants["t1"])) < 1e-9
    assert abs(a.outer_radius - math.sqrt(rep.constants["t2"])) < 1e-9
    assert d.min_abs_F_on_attached > 1


def test_avoidance_curve_meeting_surface_rejected():
    bad = AvoidanceCurve(linear(cz=1, c0=-4), "z = 4")
    with pytest.raises(ValidationFailed):
        hull_decompose(K, V=bad, resolution=64)


def test_chart_mismatch_detected(monkeypatch):
    chart = PlanarChart(1, "u", ChartMap(1, 1, 0, 0), "test", INTERIOR, ())
    with pytest.raises(ValueError):
        bounded_components(chart, [0.0])
    # a chart coordinate that is not centred on the circles
    from rathull import fibration

    class Shifted(fibration.KleinModel):
        def chart_coordinate(self, z, w, t):
            return w + 0.5

    monkeypatch.setattr(fibration, "fiber_model", Shifted)
    with pytest.raises(ChartMismatch):
        fiber_solve(K, None, 1)
