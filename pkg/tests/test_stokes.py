import math

import numpy as np
import pytest
from scipy import integrate

from rathull.errors import InvalidParams
from rathull.stokes import (
    BASIS,
    EXACT_FORMS,
    RealPolynomial,
    exact_form,
    one_form,
    stokes_bounding_check,
    surface_integral,
)
from rathull.surfaces import HopfTorus, KleinBottle, SpinTorus, TotallyRealDisc, validate_family


def test_real_polynomial_derivative():
    p = RealPolynomial.of({(2, 1, 0, 0): 3.0, (0, 0, 0, 1): 1.0})
    assert p.diff(0) == RealPolynomial.of({(1, 1, 0, 0): 6.0})
    x = np.array([2.0, 5.0, 0.0, 1.0])[:, None]
    assert p(x)[0] == 3 * 4 * 5 + 1


def test_exact_forms_are_closed():
    for f in EXACT_FORMS:
        assert f.is_closed
    assert not one_form("x dy", dx2={(1, 0, 0, 0): 1}).is_closed
    assert len(BASIS) == 6


@pytest.mark.parametrize("family", [SpinTorus(), HopfTorus(), TotallyRealDisc()], ids=lambda f: f.name)
def test_stokes_gallery(family):
    rep = stokes_bounding_check(family, resolution=256)
    assert rep.passed
    assert rep.boundary_distance < 1e-9
    for row in rep.exact_rows:
        assert abs(row.surface) < 1e-9 and abs(row.boundary) < 1e-9


def test_surface_integral_against_adaptive_quadrature():
    # independent oracle: scipy dblquad of the pulled-back 2-form
    fam = HopfTorus()
    c = validate_family(fam).constants
    lo, hi = sorted((c["s1"], c["s2"]))
    form = BASIS[0]  # Re z dIm z, d = dRe z ^ dIm z

    def density(v, u):
        (zu, _), (zv, _) = fam.partials(u, v)
        return zu.real * zv.imag - zv.real * zu.imag

    ref, _ = integrate.dblquad(density, lo, hi, 0, 2 * math.pi, epsabs=1e-11, epsrel=1e-11)
    assert abs(surface_integral(form, fam, lo, hi, 256) - ref) < 1e-8


def test_disc_band_is_area_of_annulus_in_z():
    # Re z dIm z over the band projects to the z-annulus of area pi (t2 - t1)
    fam = TotallyRealDisc()
    rep = stokes_bounding_check(fam, resolution=128)
    row = rep.rows[0]
    assert abs(row.boundary - math.pi * (0.8 - 0.3)) < 1e-12


def test_klein_not_supported():
    with pytest.raises(InvalidParams):
        stokes_bounding_check(KleinBottle())


def test_exact_form_helper():
    f = exact_form("d(xy)", {(1, 1, 0, 0): 1.0})
    assert f.coeffs[0] == RealPolynomial.of({(0, 1, 0, 0): 1.0})
