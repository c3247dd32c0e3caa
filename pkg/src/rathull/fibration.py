"""Fibration engine: the hull bound for surfaces fibered by a rational map.

For a surface X, a rational map f = p/q with no poles on X and an
avoidance curve V = {F = 0} disjoint from X, the rational hull of X is
contained in X together with the bounded components of f^{-1}(t) minus X_t
that avoid V, over t in f(X).  This module computes that candidate set for
the gallery families.

Every fiber variety of the gallery is a rational curve charted by a single
complex coordinate u through a monomial map u -> (c_z u^e_z, c_w u^e_w),
and the fiber circles on the surface are concentric about u = 0.  Component
analysis works in that chart and the concentric-circle assumption is
checked, not assumed.  The hypothesis R(Gamma) = C(Gamma) on the image
curve is recorded in every result but never checked.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from .curves import self_intersections
from .errors import (
    ChartMismatch,
    InvalidParams,
    NotOnGamma,
    PoleOnSurface,
    RootFindFailure,
    SingularFiber,
    ValidationFailed,
)
from .numerics import find_root_1d
from .poly import ONE, BivariatePolynomial, W, Z, laurent_roots, linear, monomial
from .surfaces import (
    HopfTorus,
    KleinBottle,
    KleinStar,
    SpinTorus,
    SurfaceFamily,
    TotallyRealDisc,
    ValidationReport,
    validate_family,
)

HYPOTHESIS_NOTICE = "R(Gamma) = C(Gamma) is assumed for the image curve Gamma and is not checked numerically."
GAMMA_TOL = 1e-6
ON_VARIETY_TOL = 1e-9
ZERO_FIBER_TOL = 1e-12
RADIUS_MERGE_TOL = 1e-9

INTERIOR = "interior-point"
PUNCTURE = "puncture-with-unbounded-end"
ABSENT = "absent"


@dataclass(frozen=True)
class RationalMap:
    """f = p/q with the fiber convention f^{-1}(t) = {p = t q}."""

    p: BivariatePolynomial
    q: BivariatePolynomial
    descriptor: str

    def __post_init__(self):
        if self.q.is_zero:
            raise InvalidParams("denominator is identically zero")

    def __call__(self, z, w):
        return self.p(z, w) / self.q(z, w)

    def fiber_residual(self, z, w, t):
        return np.abs(self.p(z, w) - t * self.q(z, w))

    def to_dict(self) -> dict:
        return {"descriptor": self.descriptor, "p": self.p.to_terms(), "q": self.q.to_terms()}


@dataclass(frozen=True)
class AvoidanceCurve:
    F: BivariatePolynomial
    descriptor: str

    def to_dict(self) -> dict:
        return {"descriptor": self.descriptor, "F": self.F.to_terms()}


MAP_W2_OVER_Z = RationalMap(monomial(0, 2), Z, "w^2/z")
MAP_ZW2 = RationalMap(monomial(1, 2), ONE, "z*w^2")
MAP_2ZW = RationalMap(monomial(1, 1, 2.0), ONE, "2*z*w")
MAP_ZW = RationalMap(monomial(1, 1), ONE, "z*w")
MAP_Z = RationalMap(Z, ONE, "z")

V_Z = AvoidanceCurve(Z, "z = 0")
V_W = AvoidanceCurve(W, "w = 0")
V_Z_MINUS_2 = AvoidanceCurve(linear(cz=1, c0=-2), "z - 2 = 0")

MAPS = {m.descriptor: m for m in (MAP_W2_OVER_Z, MAP_ZW2, MAP_2ZW, MAP_ZW, MAP_Z)}
CURVES = {"z": V_Z, "w": V_W, "z-2": V_Z_MINUS_2}


# --- per-family fiber models ----------------------------------------------------

@dataclass(frozen=True)
class ChartMap:
    """u -> (cz u^ez, cw u^ew)."""

    cz: complex
    ez: int
    cw: complex
    ew: int

    def __call__(self, u):
        u = np.asarray(u, dtype=complex)
        z = self.cz * u**self.ez if self.ez else np.full(u.shape, self.cz, dtype=complex)
        w = self.cw * u**self.ew if self.ew else np.full(u.shape, self.cw, dtype=complex)
        return z, w


class FiberModel:
    """How a gallery family sits over its fibering map.

    ``fiber_param`` indexes circles on the surface (the surface parameter
    that is constant along each fiber circle) and ``circle_axis`` is the
    position of the parameter running around the circle.
    """

    family: SurfaceFamily
    rational_map: RationalMap
    avoidance: AvoidanceCurve
    fiber_domain: tuple[float, float]
    fiber_periodic: bool
    circle_axis: int

    def __init__(self, family: SurfaceFamily):
        self.family = family

    def t_of(self, s):
        raise NotImplementedError

    def dt_of(self, s):
        raise NotImplementedError

    def chart(self, t: complex) -> tuple[str, ChartMap, str, str, str | None]:
        """(coordinate name, chart map, variety description, origin status, note)."""
        raise NotImplementedError

    def chart_coordinate(self, z, w, t):
        raise NotImplementedError

    def special_params(self, report: ValidationReport) -> list[float]:
        return []

    def circle_points(self, s: float, n: int):
        v = np.linspace(0, 2 * math.pi, n, endpoint=False)
        if self.circle_axis == 0:
            return v, self.family.evaluate(v, s)
        return v, self.family.evaluate(s, v)


class KleinModel(FiberModel):
    rational_map = MAP_W2_OVER_Z
    avoidance = V_Z
    fiber_domain = (-math.pi, 0.0)
    fiber_periodic = False
    circle_axis = 0

    def t_of(self, s):
        return self.family.h(s) ** 2

    def dt_of(self, s):
        return 2 * self.family.h(s) * self.family.dh(s)

    def chart(self, t):
        if abs(t) <= ZERO_FIBER_TOL:
            return ("z", ChartMap(1, 1, 0, 0), "plane {w = 0}", INTERIOR,
                    "fiber {w^2 = 0}: the plane w = 0 counted with multiplicity two")
        return "w", ChartMap(1 / t, 2, 1, 1), "{w^2 = t z}, z = w^2/t", INTERIOR, None

    def chart_coordinate(self, z, w, t):
        return z if abs(t) <= ZERO_FIBER_TOL else w


class KleinStarModel(KleinModel):
    rational_map = MAP_ZW2

    def chart(self, t):
        if abs(t) <= ZERO_FIBER_TOL:
            return ("z", ChartMap(1, 1, 0, 0), "plane {w = 0} (component of {z w^2 = 0})", INTERIOR,
                    "fiber {z w^2 = 0}: the line z = 0 plus the plane w = 0 with multiplicity two")
        return "w", ChartMap(t, -2, 1, 1), "{z w^2 = t}, z = t/w^2", PUNCTURE, None


class HopfModel(FiberModel):
    rational_map = MAP_2ZW
    avoidance = V_Z
    fiber_domain = (0.0, 2 * math.pi)
    fiber_periodic = True
    circle_axis = 1

    def t_of(self, s):
        return self.family.projection(s)

    def dt_of(self, s):
        return self.family.projection_derivative(s)

    def chart(self, t):
        if abs(t) <= ZERO_FIBER_TOL:
            raise SingularFiber("{2zw = 0} is a pair of crossing lines")
        return "z", ChartMap(1, 1, t / 2, -1), "{2zw = t}, w = t/(2z)", PUNCTURE, None

    def chart_coordinate(self, z, w, t):
        return z

    def special_params(self, report):
        return [report.constants["s1"], report.constants["s2"]]


class SpinModel(FiberModel):
    rational_map = MAP_Z
    avoidance = V_W
    fiber_domain = (0.0, 2 * math.pi)
    fiber_periodic = True
    circle_axis = 1

    def t_of(self, s):
        return self.family.z_profile(s)

    def dt_of(self, s):
        from .surfaces import profile_derivative

        return profile_derivative(self.family.z_profile, s)

    def chart(self, t):
        return "w", ChartMap(t, 0, 1, 1), "{z = t}", INTERIOR, None

    def chart_coordinate(self, z, w, t):
        return w

    def special_params(self, report):
        return [report.constants["theta1"], report.constants["theta2"]]


class DiscModel(FiberModel):
    rational_map = MAP_ZW
    avoidance = V_Z_MINUS_2
    fiber_domain = (0.0, 1.0)
    fiber_periodic = False
    circle_axis = 1

    def t_of(self, s):
        return self.family.curve(s)

    def dt_of(self, s):
        return self.family.curve_derivative(s)

    def chart(self, t):
        if abs(t) <= ZERO_FIBER_TOL:
            raise SingularFiber("{zw = 0} is a pair of crossing lines; the fiber on D is the point (0, 0)")
        return "z", ChartMap(1, 1, t, -1), "{zw = t}, w = t/z", PUNCTURE, None

    def chart_coordinate(self, z, w, t):
        return z

    def special_params(self, report):
        return [report.constants["t1"], report.constants["t2"]]


def fiber_model(family: SurfaceFamily) -> FiberModel:
    if isinstance(family, KleinStar):
        return KleinStarModel(family)
    if isinstance(family, KleinBottle):
        return KleinModel(family)
    if isinstance(family, HopfTorus):
        return HopfModel(family)
    if isinstance(family, SpinTorus):
        return SpinModel(family)
    if isinstance(family, TotallyRealDisc):
        return DiscModel(family)
    raise InvalidParams(f"no fibration model for {type(family).__name__}")


def _model(family: SurfaceFamily, f: RationalMap | None) -> FiberModel:
    model = fiber_model(family)
    if f is not None and f.descriptor != model.rational_map.descriptor:
        raise InvalidParams(
            f"{family.name} is analysed with f = {model.rational_map.descriptor}, not {f.descriptor}"
        )
    return model


# --- Gamma ------------------------------------------------------------------------

@dataclass
class GammaCurve:
    params: np.ndarray
    values: np.ndarray
    closure_gap: float
    crossings: list
    min_separation: float
    min_abs_q: float

    @property
    def simple(self) -> bool:
        return not self.crossings and self.min_separation > 0

    def summary(self) -> dict:
        return {
            "samples": int(self.values.size),
            "closure_gap": self.closure_gap,
            "simple": self.simple,
            "min_separation": self.min_separation,
            "crossings": [{"s1": c.s1, "s2": c.s2, "t": [c.point.real, c.point.imag]} for c in self.crossings],
            "min_abs_q_on_surface": self.min_abs_q,
        }


def min_abs_on_surface(family: SurfaceFamily, P: BivariatePolynomial, n: int = 256) -> float:
    U, V = family.grid(n)
    z, w = family.evaluate(U, V)
    return float(np.min(np.abs(P(z, w))))


def gamma_curve(family: SurfaceFamily, f: RationalMap | None = None, samples: int = 2048) -> GammaCurve:
    """Samples of Gamma = f(X) along the fiber representatives, with regularity data."""
    model = _model(family, f)
    mq = min_abs_on_surface(family, model.rational_map.q)
    if mq <= 0:
        raise PoleOnSurface(f"q vanishes on {family.name}")
    lo, hi = model.fiber_domain
    if model.fiber_periodic:
        s = lo + (hi - lo) * np.arange(samples) / samples
    else:
        s = np.linspace(lo, hi, samples)
    t = model.t_of(s)
    if model.fiber_periodic:
        gap = float(abs(model.t_of(np.array([hi]))[0] - t[0]))
    else:
        gap = float(abs(t[-1] - t[0]))
    closed = model.fiber_periodic or gap < GAMMA_TOL
    crossings = self_intersections(model.t_of, model.dt_of, lo, hi, periodic=closed, samples=samples)
    pts = t[:-1] if (closed and not model.fiber_periodic) else t
    n = pts.size
    D = np.abs(pts[:, None] - pts[None, :])
    i = np.arange(n)
    sep = np.abs(i[:, None] - i[None, :])
    if closed:
        sep = np.minimum(sep, n - sep)
    min_sep = float(np.min(D[sep >= max(2, n // 64)]))
    return GammaCurve(s, t, gap, crossings, min_sep, mq)


# --- fibers -----------------------------------------------------------------------

@dataclass
class FiberCircle:
    param: float
    chart_radius: float
    model: FiberModel = field(repr=False)

    def samples(self, n: int = 256):
        """(circle parameter, z, w) along the circle."""
        v, (z, w) = self.model.circle_points(self.param, n)
        return v, z, w


@dataclass
class FiberSolution:
    t: complex
    circles: list[FiberCircle]
    distance_to_gamma: float

    @property
    def params(self) -> list[float]:
        return [c.param for c in self.circles]


def _solve_on_curve(model: FiberModel, t: complex, grid: int = 2048):
    """Parameters s with t_of(s) = t, and the distance from t to the curve."""
    lo, hi = model.fiber_domain
    periodic = model.fiber_periodic
    if periodic:
        s = lo + (hi - lo) * np.arange(grid) / grid
    else:
        s = np.linspace(lo, hi, grid + 1)
    d = np.abs(model.t_of(s) - t)
    n = s.size
    if periodic:
        left, right = np.roll(d, 1), np.roll(d, -1)
    else:
        left = np.concatenate([[np.inf], d[:-1]])
        right = np.concatenate([d[1:], [np.inf]])
    cand = np.nonzero((d <= left) & (d <= right))[0]

    def gap_sq(x):
        g = complex(model.t_of(np.array([x]))[0] - t)
        dg = complex(model.dt_of(np.array([x]))[0])
        return 2 * (g.conjugate() * dg).real

    def dist(x):
        return float(abs(model.t_of(np.array([x]))[0] - t))

    h = (hi - lo) / grid
    found: list[tuple[float, float]] = []
    for i in cand:
        a, b = s[i] - h, s[i] + h
        if not periodic:
            a, b = max(a, lo), min(b, hi)
        best = float(s[i])
        try:
            if gap_sq(a) < 0 < gap_sq(b):
                best = find_root_1d(gap_sq, (a, b), tol=1e-15)
        except Exception as exc:  # pragma: no cover - brentq failure is reported upward
            raise RootFindFailure(str(exc)) from exc
        if not periodic:
            best = min(max(best, lo), hi)
            for end in (lo, hi):
                if dist(end) < dist(best):
                    best = end
        found.append((best, dist(best)))
    found.sort(key=lambda p: p[1])
    return found, (found[0][1] if found else float(np.min(d)))


def fiber_solve(family: SurfaceFamily, f: RationalMap | None, t: complex, strict: bool = False) -> FiberSolution:
    """Circles X_t = X intersected with {p = t q}, indexed by fiber parameter."""
    model = _model(family, f)
    t = complex(t)
    if isinstance(model, KleinModel) and abs(t) <= ZERO_FIBER_TOL:
        params = [-math.pi, 0.0]
        dist = 0.0
    else:
        cands, dist = _solve_on_curve(model, t)
        scale = max(1.0, abs(t))
        params = []
        lo, hi = model.fiber_domain
        period = hi - lo
        for s, d in cands:
            if d > ON_VARIETY_TOL * scale:
                continue
            if model.fiber_periodic:
                s = lo + (s - lo) % period
            dup = False
            for p in params:
                gap = abs(p - s)
                if model.fiber_periodic:
                    gap = min(gap, period - gap)
                if gap < 1e-7:
                    dup = True
            if not dup:
                params.append(float(s))
    if strict and dist > GAMMA_TOL:
        raise NotOnGamma(f"t = {t} lies {dist:.3e} from Gamma")
    circles = []
    for s in sorted(params):
        _, (z, w) = model.circle_points(s, 64)
        u = np.abs(model.chart_coordinate(z, w, t))
        r = float(np.mean(u))
        if np.max(np.abs(u - r)) > 1e-9 * max(1.0, r):
            raise ChartMismatch(f"fiber circle at parameter {s} is not centred in the chart")
        circles.append(FiberCircle(s, r, model))
    return FiberSolution(t, circles, dist)


# --- charts and components ----------------------------------------------------------

@dataclass(frozen=True)
class PlanarChart:
    t: complex
    coordinate: str
    chart_map: ChartMap
    variety: str
    origin_status: str
    v_locus: tuple[complex, ...]
    multiplicity_note: str | None = None

    def to_dict(self) -> dict:
        return {
            "t": [self.t.real, self.t.imag],
            "coordinate": self.coordinate,
            "variety": self.variety,
            "origin_status": self.origin_status,
            "v_locus": [[v.real, v.imag] for v in self.v_locus],
            "multiplicity_note": self.multiplicity_note,
        }


def variety_chart(family: SurfaceFamily, f: RationalMap | None, t: complex, V: AvoidanceCurve | None = None) -> PlanarChart:
    model = _model(family, f)
    V = V or model.avoidance
    t = complex(t)
    coord, cmap, desc, status, note = model.chart(t)
    laurent = V.F.compose_monomial(cmap.cz, cmap.ez, cmap.cw, cmap.ew)
    if not laurent:
        raise ValidationFailed("V must not contain a fiber variety", f"F vanishes on {desc}")
    locus = tuple(laurent_roots(laurent, include_origin=(status == INTERIOR)))
    return PlanarChart(t, coord, cmap, desc, status, locus, note)


@dataclass(frozen=True)
class Component:
    kind: str
    inner: float | None
    outer: float | None
    bounded: bool
    contains_v: bool

    def to_dict(self) -> dict:
        return {"kind": self.kind, "inner": self.inner, "outer": self.outer,
                "bounded": self.bounded, "contains_v": self.contains_v}


@dataclass(frozen=True)
class ComponentInventory:
    components: tuple[Component, ...]

    @property
    def bounded(self) -> list[Component]:
        return [c for c in self.components if c.bounded]

    @property
    def attached(self) -> list[Component]:
        return [c for c in self.components if c.bounded and not c.contains_v]

    @property
    def excluded(self) -> list[Component]:
        return [c for c in self.components if c.bounded and c.contains_v]


def _merge_radii(radii: Sequence[float]) -> list[float]:
    out: list[float] = []
    for r in sorted(radii):
        if r <= 0:
            raise ValueError("chart radii must be positive")
        if out and r - out[-1] <= RADIUS_MERGE_TOL * max(1.0, r):
            continue
        out.append(float(r))
    return out


def bounded_components(chart: PlanarChart, radii: Sequence[float]) -> ComponentInventory:
    """Components of the chart plane minus concentric circles, with V flags."""
    rs = _merge_radii(radii)
    if not rs:
        return ComponentInventory((Component("plane", None, None, False, bool(chart.v_locus)),))
    mods = [abs(v) for v in chart.v_locus]

    def has_v(lo, hi):
        return any((lo is None or m > lo) and (hi is None or m < hi) for m in mods)

    comps = []
    inner_kind = "disc" if chart.origin_status == INTERIOR else "punctured-disc"
    comps.append(Component(inner_kind, None, rs[0], chart.origin_status != PUNCTURE, has_v(None, rs[0])))
    for lo, hi in zip(rs, rs[1:]):
        comps.append(Component("annulus", lo, hi, True, has_v(lo, hi)))
    comps.append(Component("outer", rs[-1], None, False, has_v(rs[-1], None)))
    return ComponentInventory(tuple(comps))


# --- decomposition ---------------------------------------------------------------------

@dataclass
class AttachedComponent:
    """A bounded V-avoiding component of a special fiber, as a region in its chart."""

    t: complex
    kind: str
    coordinate: str
    inner_radius: float | None
    outer_radius: float
    chart_map: ChartMap
    boundary_params: list[float]
    variety: str
    on_sphere: bool = False

    def sample(self, n_radial: int = 16, n_angle: int = 64):
        lo = self.inner_radius or 0.0
        rho = np.linspace(lo, self.outer_radius, n_radial)
        psi = np.linspace(0, 2 * math.pi, n_angle, endpoint=False)
        u = rho[:, None] * np.exp(1j * psi[None, :])
        return self.chart_map(u)

    def boundary_circle(self, radius: float, n: int = 256):
        psi = np.linspace(0, 2 * math.pi, n, endpoint=False)
        return psi, self.chart_map(radius * np.exp(1j * psi))

    def latitude_bounds(self) -> tuple[float, float] | None:
        """|z|^2 - |w|^2 at the two boundary circles, for annuli on the unit sphere."""
        if not self.on_sphere or self.inner_radius is None:
            return None
        vals = []
        for r in (self.inner_radius, self.outer_radius):
            z, w = self.chart_map(np.array([r + 0j]))
            vals.append(float(abs(z[0]) ** 2 - abs(w[0]) ** 2))
        return vals[0], vals[1]

    def to_dict(self) -> dict:
        d = {
            "t": [self.t.real, self.t.imag],
            "kind": self.kind,
            "coordinate": self.coordinate,
            "inner_radius": self.inner_radius,
            "outer_radius": self.outer_radius,
            "boundary_params": list(self.boundary_params),
            "variety": self.variety,
        }
        lat = self.latitude_bounds()
        if lat is not None:
            d["latitude_bounds"] = list(lat)
        return d


@dataclass
class FiberRecord:
    param: float
    t: complex
    circle_params: list[float]
    radii: list[float]
    bounded: int
    excluded: int
    attached: int


@dataclass
class HullDecomposition:
    family: str
    rational_map: str
    avoidance: str
    gamma: np.ndarray
    fibers: list[FiberRecord]
    attached: list[AttachedComponent]
    min_abs_F_on_surface: float
    min_abs_F_on_attached: float
    constants: dict
    hypothesis: str = HYPOTHESIS_NOTICE

    @property
    def surface_description(self) -> str:
        return f"{self.family} together with {len(self.attached)} attached component(s)"

    def summary(self) -> dict:
        return {
            "family": self.family,
            "rational_map": self.rational_map,
            "avoidance_curve": self.avoidance,
            "fibers_sampled": len(self.fibers),
            "fibers_with_attached": sum(1 for r in self.fibers if r.attached),
            "fibers_with_excluded": sum(1 for r in self.fibers if r.excluded),
            "attached": [a.to_dict() for a in self.attached],
            "min_abs_F_on_surface": self.min_abs_F_on_surface,
            "min_abs_F_on_attached": self.min_abs_F_on_attached,
            "hypothesis": self.hypothesis,
        }


def hull_decompose(
    family: SurfaceFamily,
    f: RationalMap | None = None,
    V: AvoidanceCurve | None = None,
    resolution: int = 1024,
    validation: ValidationReport | None = None,
) -> HullDecomposition:
    """Candidate rational hull: the surface plus V-avoiding bounded fiber components.

    Fibers are visited through their representatives in the fiber parameter
    (a uniform grid plus the located double-point parameters), so the image
    curve never has to be inverted near its critical values.
    """
    model = _model(family, f)
    V = V or model.avoidance
    validation = validation or validate_family(family)
    mF = min_abs_on_surface(family, V.F)
    if mF <= 0:
        raise ValidationFailed("V must avoid the surface", f"min |F| = {mF:.3e}")
    lo, hi = model.fiber_domain
    if model.fiber_periodic:
        reps = lo + (hi - lo) * np.arange(resolution) / resolution
    else:
        reps = np.linspace(lo, hi, resolution)
    reps = np.concatenate([reps, model.special_params(validation)])

    records: list[FiberRecord] = []
    attached: dict[tuple, AttachedComponent] = {}
    for s in reps:
        t = complex(model.t_of(np.array([s]))[0])
        if abs(t) <= ZERO_FIBER_TOL:
            t = 0j
        if t == 0 and not isinstance(model, KleinModel):
            records.append(FiberRecord(float(s), t, [], [], 0, 0, 0))
            continue
        sol = fiber_solve(family, model.rational_map, t)
        chart = variety_chart(family, model.rational_map, t, V)
        radii = [c.chart_radius for c in sol.circles]
        inv = bounded_components(chart, radii)
        for comp in inv.attached:
            key = (round(t.real, 9), round(t.imag, 9), round(comp.inner or 0.0, 9), round(comp.outer, 9))
            if key in attached:
                continue
            bparams = [c.param for c in sol.circles if any(
                abs(c.chart_radius - r) <= RADIUS_MERGE_TOL * max(1.0, r) for r in (comp.inner, comp.outer) if r)]
            attached[key] = AttachedComponent(t, comp.kind, chart.coordinate, comp.inner, comp.outer,
                                              chart.chart_map, bparams, chart.variety,
                                              isinstance(model, HopfModel))
        records.append(FiberRecord(float(s), t, sol.params, radii, len(inv.bounded), len(inv.excluded), len(inv.attached)))

    comps = list(attached.values())
    mA = math.inf
    for a in comps:
        z, w = a.sample()
        mA = min(mA, float(np.min(np.abs(V.F(z, w)))))
    gamma = model.t_of(reps[:resolution])
    return HullDecomposition(
        family.name, model.rational_map.descriptor, V.descriptor, gamma, records, comps, mF,
        mA, validation.constants,
    )
