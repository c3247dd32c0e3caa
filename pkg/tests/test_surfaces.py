import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from rathull.errors import DegeneratePoint, InvalidParams, NotOnSphere, ValidationFailed
from rathull.surfaces import (
    ComplexProfile,
    DiscProfile,
    HopfTorus,
    KleinBottle,
    KleinStar,
    SpinTorus,
    TotallyRealDisc,
    TrigProfile,
    eval_surface,
    family_from_dict,
    hopf_map,
    klein_identification_check,
    numeric_partials,
    tangent_determinant,
    tangent_frame,
    total_reality_scan,
    validate_family,
)

K = KleinBottle(2.0, 1.0)
angles = st.floats(-math.pi, math.pi, allow_nan=False)
GALLERY = [KleinBottle(), KleinStar(), HopfTorus(), SpinTorus(), TotallyRealDisc()]


@pytest.mark.parametrize(
    "theta, phi, expected",
    [(0.0, 0.0, (9, 0)), (0.0, -math.pi, (1, 0)), (math.pi / 2, math.pi / 2, (-4, 2j))],
)
def test_klein_evaluation(theta, phi, expected):
    p = eval_surface(K, theta, phi)
    assert abs(p.z - expected[0]) < 1e-14 and abs(p.w - expected[1]) < 1e-14


def test_klein_rejects_degenerate_params():
    with pytest.raises(InvalidParams):
        KleinBottle(1.0, 1.0)
    with pytest.raises(InvalidParams):
        KleinBottle(1.0, 0.0)


def test_klein_frame_at_origin():
    d_theta, d_phi = tangent_frame(K, 0.0, 0.0)
    assert abs(d_theta.z - 18j) < 1e-14 and abs(d_theta.w) < 1e-14
    assert abs(d_phi.z) < 1e-14 and abs(d_phi.w - 3 * (1 + 2j)) < 1e-14
    assert abs(abs(tangent_determinant(K, 0.0, 0.0)) - 54 * math.sqrt(5)) < 1e-12


@pytest.mark.parametrize("family", GALLERY, ids=lambda f: f.name)
def test_analytic_partials_match_finite_differences(family):
    rng = np.random.default_rng(7)
    for _ in range(5):
        (lo0, hi0, _), (lo1, hi1, _) = family.domain
        u = rng.uniform(lo0 + 0.05 * (hi0 - lo0), hi0 - 0.05 * (hi0 - lo0))
        v = rng.uniform(lo1, hi1)
        exact = family.partials(u, v)
        approx = numeric_partials(family, u, v)
        for e, a in zip(exact, approx):
            for x, y in zip(e, a):
                assert abs(x - y) < 1e-8 * max(1.0, abs(x))


def test_degenerate_point_raises():
    with pytest.raises(DegeneratePoint):
        tangent_frame(TotallyRealDisc(), 0.0, 0.3)


@settings(max_examples=100)
@given(angles, angles)
def test_klein_identification_identity(theta, phi):
    z1, w1 = K.evaluate(theta + math.pi, -phi)
    z2, w2 = K.evaluate(theta, phi)
    assert abs(z1 - z2) < 1e-13 and abs(w1 - w2) < 1e-13


@settings(max_examples=100)
@given(angles, angles, st.floats(0.1, 3.0), st.floats(0.05, 0.95))
def test_fibering_is_theta_independent_and_modulus_bounds(theta, phi, a, ratio):
    fam = KleinBottle(a, ratio * a)
    z, w = fam.evaluate(theta, phi)
    assert abs(w * w / z - fam.h(phi) ** 2) < 1e-12 * (1 + abs(fam.h(phi)) ** 2)
    assert fam.inner_radius * (1 - 1e-12) <= abs(z) <= fam.outer_radius * (1 + 1e-12)
    assert abs(abs(z) - fam.g(phi) ** 2) < 1e-12 * fam.outer_radius


def test_identification_check_report():
    rep = klein_identification_check(K, 128)
    assert rep.max_identification_error < 1e-12
    assert rep.min_nonequivalent_distance > 0


def test_identification_check_min_distance_against_brute_force():
    # brute force over every pair of a coarse grid, skipping equivalent points
    n = 32
    rep = klein_identification_check(K, n)
    T, P = K.grid(n)
    z, w = K.evaluate(T, P)
    pts = np.stack([z.ravel(), w.ravel()], axis=1)
    i, j = np.meshgrid(np.arange(n), np.arange(n), indexing="ij")
    ident = (i.ravel(), j.ravel())
    partner = ((ident[0] + n // 2) % n) * n + (n - ident[1]) % n
    best = np.inf
    for k in range(n * n):
        d = np.sqrt(np.sum(np.abs(pts - pts[k]) ** 2, axis=1))
        d[k] = np.inf
        d[partner[k]] = np.inf
        best = min(best, d.min())
    assert abs(best - rep.min_nonequivalent_distance) < 1e-12


def test_total_reality_klein_star_determinant_formula():
    # det = 2i e^{i theta} g h' for K*, never zero
    fam = KleinStar()
    rng = np.random.default_rng(3)
    th, ph = rng.uniform(-math.pi, math.pi, (2, 20))
    det = tangent_determinant(fam, th, ph)
    assert np.allclose(det, 2j * np.exp(1j * th) * fam.g(ph) * fam.dh(ph), atol=1e-12)


@pytest.mark.parametrize("family", GALLERY, ids=lambda f: f.name)
def test_total_reality_gallery_passes_and_refines(family):
    r256 = total_reality_scan(family, 256)
    r512 = total_reality_scan(family, 512)
    assert r256.passed and r512.passed
    if family.domain[0][2]:  # nested grids only when both axes are periodic
        assert r512.min_abs_det <= r256.min_abs_det + 1e-12


def test_total_reality_klein_minimum_is_analytic():
    # |det| = 2 g^3 |h'|; the grid minimum cannot undercut the true minimum
    phi = np.linspace(-math.pi, math.pi, 200001)
    true_min = np.min(2 * K.g(phi) ** 3 * np.abs(K.dh(phi)))
    rep = total_reality_scan(K, 256)
    assert true_min <= rep.min_abs_det < true_min * 1.01


def test_total_reality_requires_resolution():
    with pytest.raises(ValueError):
        total_reality_scan(K, 32)


def test_embedded_spin_profile_rejected_before_scan():
    circle = ComplexProfile(TrigProfile(0.0, (1.0,)), TrigProfile(0.0, (), (1.0,)))
    fam = SpinTorus(circle, TrigProfile(1.0))
    with pytest.raises(ValidationFailed):
        validate_family(fam)
    with pytest.raises(ValidationFailed):
        total_reality_scan(fam, 64)


def test_spin_with_equal_radii_rejected():
    with pytest.raises(ValidationFailed):
        validate_family(SpinTorus(r_profile=TrigProfile(1.0)))


def test_hopf_map_examples():
    assert hopf_map(1, 0) == (0, 1)
    t, h = hopf_map(1 / math.sqrt(2), 1 / math.sqrt(2))
    assert abs(t - 1) < 1e-15 and abs(h) < 1e-15
    with pytest.raises(NotOnSphere):
        hopf_map(1, 1)


@settings(max_examples=100)
@given(st.lists(st.floats(-1, 1), min_size=4, max_size=4).filter(lambda v: np.linalg.norm(v) > 0.1))
def test_hopf_map_lands_on_sphere(v):
    v = np.asarray(v) / np.linalg.norm(v)
    t, h = hopf_map(complex(v[0], v[1]), complex(v[2], v[3]))
    assert abs(abs(t) ** 2 + h * h - 1) < 1e-9


def test_hopf_torus_lies_on_s3_over_gamma():
    fam = HopfTorus()
    S, U = fam.grid(64)
    z, w = fam.evaluate(S, U)
    assert np.max(np.abs(np.abs(z) ** 2 + np.abs(w) ** 2 - 1)) < 1e-14
    xy, height = fam.sphere_curve(S)
    assert np.max(np.abs(2 * z * w - xy)) < 1e-14
    assert np.max(np.abs(np.abs(z) ** 2 - np.abs(w) ** 2 - height)) < 1e-14


def test_hopf_default_double_point_closed_form():
    # latitude 0.15 + 0.6 sin s + 0.4 cos s meets its mirror where cos s = -0.15/0.4
    rep = validate_family(HopfTorus())
    s1 = math.acos(-0.375)
    a = math.cos(0.6 * math.sin(s1)) * np.exp(1j * (0.9 + 0.5 * math.cos(s1)))
    assert abs(rep.constants["a"] - a) < 1e-12
    assert abs(rep.constants["s1"] - s1) < 1e-10
    assert abs(rep.constants["s2"] - (2 * math.pi - s1)) < 1e-10
    assert 0 < abs(a) < 1


def test_hopf_double_point_against_pair_scan():
    # independent oracle: brute-force nearest pair of separated projection samples
    fam = HopfTorus()
    n = 2048
    s = np.linspace(0, 2 * math.pi, n, endpoint=False)
    p = fam.projection(s)
    D = np.abs(p[:, None] - p[None, :])
    i = np.arange(n)
    gap = np.abs(i[:, None] - i[None, :])
    D[np.minimum(gap, n - gap) < n // 16] = np.inf
    k = np.unravel_index(np.argmin(D), D.shape)
    rep = validate_family(fam)
    assert abs(p[k[0]] - rep.constants["a"]) < 5e-3


def test_disc_default_double_point():
    rep = validate_family(TotallyRealDisc())
    assert abs(rep.constants["t1"] - 0.3) < 1e-12
    assert abs(rep.constants["t2"] - 0.8) < 1e-12
    alpha = 0.3 * 0.8 * np.exp(1j * 4 * math.pi * 0.3)
    assert abs(rep.constants["alpha"] - alpha) < 1e-12


def test_disc_without_double_point_rejected():
    with pytest.raises(ValidationFailed):
        validate_family(TotallyRealDisc(DiscProfile(omega=3.0)))


def test_spin_default_constants():
    rep = validate_family(SpinTorus())
    c = rep.constants
    assert abs(c["z0"] - (0.5 + 0.25j)) < 1e-12
    assert {round(c["r1"], 12), round(c["r2"], 12)} == {1.5, 0.5}


def test_user_callable_profile_uses_finite_differences():
    fam = SpinTorus(lambda t: 0.5 + np.sin(t) + 0.5j * np.sin(2 * t), lambda t: 1 + 0.5 * np.cos(t))
    ref = SpinTorus()
    for a, b in zip(fam.partials(0.4, 1.1), ref.partials(0.4, 1.1)):
        assert abs(a[0] - b[0]) < 1e-8 and abs(a[1] - b[1]) < 1e-8


@pytest.mark.parametrize("family", GALLERY, ids=lambda f: f.name)
def test_family_dict_round_trip(family):
    again = family_from_dict(family.to_dict())
    assert again == family


def test_family_from_dict_errors():
    with pytest.raises(InvalidParams):
        family_from_dict({"name": "sphere"})
    with pytest.raises(InvalidParams):
        family_from_dict({"name": "klein", "params": {"a": 1, "b": 1}})
