"""Stokes check for the cylinder in X bounded by the attached annulus boundary.

For the Hopf, spin and disc families the two fiber circles over the double
point bound a band S of the surface, and also bound the attached annulus A.
The check compares the integral of d(alpha) over S with the integral of
alpha over the oriented boundary of A, for 1-forms alpha with polynomial
coefficients in the real coordinates x = (Re z, Im z, Re w, Im w).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from itertools import combinations
from typing import Mapping

import numpy as np

from .errors import BoundaryMismatch, InvalidParams
from .fibration import fiber_model, hull_decompose
from .numerics import DEFAULT_TOL
from .surfaces import HopfTorus, SpinTorus, SurfaceFamily, TotallyRealDisc, validate_family


@dataclass(frozen=True)
class RealPolynomial:
    """Polynomial in the four real coordinates, {(e1, e2, e3, e4): c}."""

    terms: tuple[tuple[tuple[int, int, int, int], float], ...]

    @classmethod
    def of(cls, coeffs: Mapping[tuple[int, int, int, int], float]) -> "RealPolynomial":
        return cls(tuple(sorted((tuple(e), float(c)) for e, c in coeffs.items() if c != 0)))

    def __call__(self, x: np.ndarray):
        out = np.zeros(x.shape[1:])
        for e, c in self.terms:
            term = np.full(x.shape[1:], c)
            for i, p in enumerate(e):
                if p:
                    term = term * x[i] ** p
            out = out + term
        return out

    def diff(self, i: int) -> "RealPolynomial":
        out: dict = {}
        for e, c in self.terms:
            if e[i]:
                f = list(e)
                f[i] -= 1
                out[tuple(f)] = out.get(tuple(f), 0.0) + c * e[i]
        return RealPolynomial.of(out)

    def __sub__(self, other: "RealPolynomial") -> "RealPolynomial":
        out = dict(self.terms)
        for e, c in other.terms:
            out[e] = out.get(e, 0.0) - c
        return RealPolynomial.of(out)

    @property
    def is_zero(self) -> bool:
        return not self.terms


COORDS = ("Re z", "Im z", "Re w", "Im w")


@dataclass(frozen=True)
class OneForm:
    """sum_i a_i dx_i."""

    name: str
    coeffs: tuple[RealPolynomial, RealPolynomial, RealPolynomial, RealPolynomial]

    def differential(self) -> dict[tuple[int, int], RealPolynomial]:
        """Coefficients of dx_i ^ dx_j, i < j."""
        out = {}
        for i, j in combinations(range(4), 2):
            c = self.coeffs[j].diff(i) - self.coeffs[i].diff(j)
            if not c.is_zero:
                out[(i, j)] = c
        return out

    @property
    def is_closed(self) -> bool:
        return not self.differential()


def one_form(name: str, **parts: Mapping[tuple[int, int, int, int], float]) -> OneForm:
    """Build a form from keyword parts dx1..dx4 holding coefficient tables."""
    coeffs = tuple(RealPolynomial.of(parts.get(f"dx{i + 1}", {})) for i in range(4))
    return OneForm(name, coeffs)


def exact_form(name: str, potential: Mapping[tuple[int, int, int, int], float]) -> OneForm:
    u = RealPolynomial.of(potential)
    return OneForm(name, tuple(u.diff(i) for i in range(4)))


BASIS = (
    one_form("Re z dIm z", dx2={(1, 0, 0, 0): 1}),
    one_form("Re w dIm w", dx4={(0, 0, 1, 0): 1}),
    one_form("Re z dIm w", dx4={(1, 0, 0, 0): 1}),
    one_form("Im z Re w dRe z", dx1={(0, 1, 1, 0): 1}),
    one_form("Re z^2 dIm w + Im w dRe w", dx4={(2, 0, 0, 0): 1}, dx3={(0, 0, 0, 1): 1}),
    exact_form("d(Re z Im w)", {(1, 0, 0, 1): 1}),
)
EXACT_FORMS = (
    exact_form("d(Re z Im w)", {(1, 0, 0, 1): 1}),
    exact_form("d(Re z^2 Re w + Im z Im w^2)", {(2, 0, 1, 0): 1, (0, 1, 0, 2): 1}),
    one_form("0"),
)


def _real(z, w) -> np.ndarray:
    return np.stack([z.real, z.imag, w.real, w.imag])


def surface_integral(form: OneForm, family: SurfaceFamily, lo: float, hi: float, n: int) -> float:
    """Integral of d(form) over the band lo <= u <= hi of a family with periodic v.

    Gauss-Legendre nodes across the band and the trapezoid rule around it,
    with the orientation du ^ dv.
    """
    nodes, weights = np.polynomial.legendre.leggauss(n)
    u = 0.5 * (hi - lo) * nodes + 0.5 * (hi + lo)
    wu = 0.5 * (hi - lo) * weights
    v = 2 * math.pi * np.arange(n) / n
    U, V = np.meshgrid(u, v, indexing="ij")
    x = _real(*family.evaluate(U, V))
    (zu, wu_), (zv, wv) = family.partials(U, V)
    xu, xv = _real(zu, wu_), _real(zv, wv)
    dens = np.zeros(U.shape)
    for (i, j), c in form.differential().items():
        dens += c(x) * (xu[i] * xv[j] - xv[i] * xu[j])
    return float(np.sum(wu[:, None] * dens) * 2 * math.pi / n)


def circle_integral(form: OneForm, points: tuple, velocity: tuple) -> float:
    """Trapezoid rule for the form along a uniformly sampled closed loop."""
    x = _real(*points)
    dx = _real(*velocity)
    n = x.shape[1]
    return float(sum(np.sum(a(x) * dx[i]) for i, a in enumerate(form.coeffs)) * 2 * math.pi / n)


@dataclass
class StokesRow:
    form: str
    surface: float
    boundary: float

    @property
    def residual(self) -> float:
        return abs(self.surface - self.boundary)


@dataclass
class StokesReport:
    family: str
    resolution: int
    orientation_sign: int
    band: tuple[float, float]
    radii: tuple[float, float]
    boundary_distance: float
    rows: list[StokesRow]
    exact_rows: list[StokesRow]
    tol: float

    @property
    def max_residual(self) -> float:
        return max(r.residual for r in self.rows)

    @property
    def passed(self) -> bool:
        return self.max_residual < self.tol

    def to_dict(self) -> dict:
        return {
            "family": self.family,
            "resolution": self.resolution,
            "orientation_sign": self.orientation_sign,
            "band": list(self.band),
            "radii": list(self.radii),
            "boundary_distance": self.boundary_distance,
            "forms": [{"form": r.form, "surface": r.surface, "boundary": r.boundary, "residual": r.residual}
                      for r in self.rows],
            "exact_forms": [{"form": r.form, "surface": r.surface, "boundary": r.boundary} for r in self.exact_rows],
            "max_residual": self.max_residual,
            "tol": self.tol,
            "passed": self.passed,
        }


def _chart_velocity(cmap, u):
    """d/dpsi of the chart map along u = R e^{i psi}."""
    z, w = cmap(u)
    return 1j * cmap.ez * z, 1j * cmap.ew * w


def stokes_bounding_check(
    family: SurfaceFamily,
    forms=BASIS,
    resolution: int = 512,
    tol: float = DEFAULT_TOL.residual_tol,
) -> StokesReport:
    if not isinstance(family, (HopfTorus, SpinTorus, TotallyRealDisc)):
        raise InvalidParams("the Stokes check covers the Hopf, spin and disc families")
    report = validate_family(family)
    model = fiber_model(family)
    lo, hi = sorted(model.special_params(report))
    decomposition = hull_decompose(family, resolution=64, validation=report)
    (annulus,) = decomposition.attached
    t = annulus.t
    psi = 2 * math.pi * np.arange(resolution) / resolution

    # the band's edges must coincide with the circles of the annulus boundary
    dist = 0.0
    edge_radius = []
    for s in (lo, hi):
        _, (z, w) = model.circle_points(s, resolution)
        u = model.chart_coordinate(z, w, t)
        r = float(np.mean(np.abs(u)))
        edge_radius.append(r)
        R = annulus.outer_radius if abs(r - annulus.outer_radius) < abs(r - annulus.inner_radius) else annulus.inner_radius
        pz, pw = annulus.chart_map(R * u / np.abs(u))
        dist = max(dist, float(np.max(np.hypot(np.abs(z - pz), np.abs(w - pw)))))
    if dist > 1e-9 or abs(edge_radius[0] - edge_radius[1]) < 1e-9:
        raise BoundaryMismatch(f"band edges are {dist:.3e} from the annulus boundary")
    # the band edge at u = hi runs with v, so it matches the outer circle when it is the larger one
    sign = 1 if edge_radius[1] > edge_radius[0] else -1

    outer = annulus.outer_radius * np.exp(1j * psi)
    inner = annulus.inner_radius * np.exp(1j * psi)
    cmap = annulus.chart_map

    def boundary(form):
        return circle_integral(form, cmap(outer), _chart_velocity(cmap, outer)) - circle_integral(
            form, cmap(inner), _chart_velocity(cmap, inner))

    def row(form):
        return StokesRow(form.name, sign * surface_integral(form, family, lo, hi, resolution), boundary(form))

    return StokesReport(
        family.name, resolution, sign, (lo, hi), (annulus.inner_radius, annulus.outer_radius), dist,
        [row(f) for f in forms], [row(f) for f in EXACT_FORMS], tol,
    )
