"""Parametrized surface gallery in C^2.

Each family maps a two-parameter domain into C^2 and supplies analytic
first partials.  The families are Rudin's Klein bottle ``K``, its image
``K*`` under (z, w) -> (z, w/z), conjugate Hopf tori, spin tori and
totally real discs.  ``validate_family`` numerically checks the
structural hypotheses each family needs downstream (double points,
immersion, embeddedness) and returns the located constants.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Any, Callable, ClassVar, NamedTuple

import numpy as np
from scipy.spatial import cKDTree

from .curves import DoublePoint, min_speed, self_intersections
from .errors import DegeneratePoint, InvalidParams, NotOnSphere, ValidationFailed

TWO_PI = 2.0 * math.pi
FD_STEP = 1e-5


class Point2C(NamedTuple):
    z: complex
    w: complex


# --- profiles ----------------------------------------------------------------

@dataclass(frozen=True)
class TrigProfile:
    """Real trigonometric polynomial const + sum cos[k-1] cos(ks) + sin[k-1] sin(ks)."""

    const: float = 0.0
    cos: tuple[float, ...] = ()
    sin: tuple[float, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "cos", tuple(float(c) for c in self.cos))
        object.__setattr__(self, "sin", tuple(float(c) for c in self.sin))

    def __call__(self, s):
        s = np.asarray(s, dtype=float)
        out = np.full(s.shape, float(self.const))
        for k, c in enumerate(self.cos, 1):
            out = out + c * np.cos(k * s)
        for k, c in enumerate(self.sin, 1):
            out = out + c * np.sin(k * s)
        return out

    def derivative(self, s):
        s = np.asarray(s, dtype=float)
        out = np.zeros(s.shape)
        for k, c in enumerate(self.cos, 1):
            out = out - k * c * np.sin(k * s)
        for k, c in enumerate(self.sin, 1):
            out = out + k * c * np.cos(k * s)
        return out

    def to_dict(self) -> dict:
        return {"const": self.const, "cos": list(self.cos), "sin": list(self.sin)}

    @classmethod
    def from_dict(cls, d: dict) -> "TrigProfile":
        return cls(float(d.get("const", 0.0)), tuple(d.get("cos", ())), tuple(d.get("sin", ())))


@dataclass(frozen=True)
class ComplexProfile:
    """Complex periodic profile re(s) + i im(s) built from two real trig polynomials."""

    re: TrigProfile
    im: TrigProfile

    def __call__(self, s):
        return self.re(s) + 1j * self.im(s)

    def derivative(self, s):
        return self.re.derivative(s) + 1j * self.im.derivative(s)

    def to_dict(self) -> dict:
        return {"re": self.re.to_dict(), "im": self.im.to_dict()}

    @classmethod
    def from_dict(cls, d: dict) -> "ComplexProfile":
        return cls(TrigProfile.from_dict(d["re"]), TrigProfile.from_dict(d["im"]))


@dataclass(frozen=True)
class DiscProfile:
    """f(t) = (1 + offset - t) exp(i omega t) on [0, 1]."""

    offset: float = 0.1
    omega: float = 4.0 * math.pi

    def __call__(self, t):
        t = np.asarray(t, dtype=float)
        return (1.0 + self.offset - t) * np.exp(1j * self.omega * t)

    def derivative(self, t):
        t = np.asarray(t, dtype=float)
        e = np.exp(1j * self.omega * t)
        return -e + 1j * self.omega * (1.0 + self.offset - t) * e

    def to_dict(self) -> dict:
        return {"offset": self.offset, "omega": self.omega}

    @classmethod
    def from_dict(cls, d: dict) -> "DiscProfile":
        return cls(float(d.get("offset", 0.1)), float(d.get("omega", 4.0 * math.pi)))


def profile_derivative(profile: Callable, s):
    """Analytic derivative when the profile has one, else a central difference."""
    deriv = getattr(profile, "derivative", None)
    if deriv is not None:
        return deriv(s)
    s = np.asarray(s, dtype=float)
    return (profile(s + FD_STEP) - profile(s - FD_STEP)) / (2 * FD_STEP)


# --- families ----------------------------------------------------------------

class SurfaceFamily:
    """Base class: a map (u, v) -> (z, w) with known parameter domain.

    ``domain`` lists (low, high, periodic) for each parameter.
    """

    name: ClassVar[str] = ""
    param_names: ClassVar[tuple[str, str]] = ("u", "v")
    domain: ClassVar[tuple[tuple[float, float, bool], tuple[float, float, bool]]]

    def evaluate(self, u, v):
        raise NotImplementedError

    def partials(self, u, v):
        raise NotImplementedError

    def params_dict(self) -> dict:
        raise NotImplementedError

    def to_dict(self) -> dict:
        return {"name": self.name, "params": self.params_dict()}

    def grid(self, n: int, m: int | None = None):
        """Tensor grid over the domain; periodic axes are uniform, others use midpoints."""
        axes = []
        for (lo, hi, periodic), count in zip(self.domain, (n, m or n)):
            k = np.arange(count)
            axes.append(lo + (hi - lo) * (k if periodic else k + 0.5) / count)
        return np.meshgrid(axes[0], axes[1], indexing="ij")


@dataclass(frozen=True)
class KleinBottle(SurfaceFamily):
    """(theta, phi) -> (e^{2i theta} g(phi)^2, e^{i theta} g(phi) h(phi))."""

    a: float = 2.0
    b: float = 1.0

    name: ClassVar[str] = "klein"
    param_names: ClassVar[tuple[str, str]] = ("theta", "phi")
    domain: ClassVar = ((-math.pi, math.pi, True), (-math.pi, math.pi, True))

    def __post_init__(self):
        if not (0 < self.b < self.a):
            raise InvalidParams(f"need 0 < b < a, got a={self.a}, b={self.b}")

    def g(self, phi):
        return self.a + self.b * np.cos(phi)

    def dg(self, phi):
        return -self.b * np.sin(phi)

    @staticmethod
    def h(phi):
        return np.sin(phi) + 1j * np.sin(2 * phi)

    @staticmethod
    def dh(phi):
        return np.cos(phi) + 2j * np.cos(2 * phi)

    @property
    def inner_radius(self) -> float:
        return (self.a - self.b) ** 2

    @property
    def outer_radius(self) -> float:
        return (self.a + self.b) ** 2

    def evaluate(self, theta, phi):
        theta = np.asarray(theta, dtype=float)
        g = self.g(phi)
        e = np.exp(1j * theta)
        return e * e * g * g, e * g * self.h(phi)

    def partials(self, theta, phi):
        e = np.exp(1j * np.asarray(theta, dtype=float))
        g, dg, h, dh = self.g(phi), self.dg(phi), self.h(phi), self.dh(phi)
        d_theta = (2j * e * e * g * g, 1j * e * g * h)
        d_phi = (2 * e * e * g * dg, e * (dg * h + g * dh))
        return d_theta, d_phi

    def params_dict(self) -> dict:
        return {"a": self.a, "b": self.b}


@dataclass(frozen=True)
class KleinStar(KleinBottle):
    """(theta, phi) -> (e^{2i theta} g^2, e^{-i theta} h / g)."""

    name: ClassVar[str] = "klein-star"

    def evaluate(self, theta, phi):
        theta = np.asarray(theta, dtype=float)
        g = self.g(phi)
        e = np.exp(1j * theta)
        return e * e * g * g, self.h(phi) / (e * g)

    def partials(self, theta, phi):
        e = np.exp(1j * np.asarray(theta, dtype=float))
        g, dg, h, dh = self.g(phi), self.dg(phi), self.h(phi), self.dh(phi)
        d_theta = (2j * e * e * g * g, -1j * h / (e * g))
        d_phi = (2 * e * e * g * dg, (dh * g - h * dg) / (e * g * g))
        return d_theta, d_phi


# Tilted ellipse in (longitude, latitude): latitude 0.15 + 0.6 sin s + 0.4 cos s,
# longitude 0.9 + 0.5 cos s.  Its projection to the disc is a figure eight.
DEFAULT_HOPF_THETA = TrigProfile(math.pi / 2 - 0.15, (-0.4,), (-0.6,))
DEFAULT_HOPF_PHI = TrigProfile(0.9, (0.5,))


@dataclass(frozen=True)
class HopfTorus(SurfaceFamily):
    """Preimage of gamma(s) = (sin T(s) e^{i P(s)}, cos T(s)) under the conjugate Hopf map.

    Parameters (s, u) give z = cos(T/2) e^{i(P/2 + u)}, w = sin(T/2) e^{i(P/2 - u)}.
    """

    theta_profile: Any = DEFAULT_HOPF_THETA
    phi_profile: Any = DEFAULT_HOPF_PHI

    name: ClassVar[str] = "hopf-torus"
    param_names: ClassVar[tuple[str, str]] = ("s", "u")
    domain: ClassVar = ((0.0, TWO_PI, True), (0.0, TWO_PI, True))

    def sphere_curve(self, s):
        th, ph = self.theta_profile(s), self.phi_profile(s)
        return np.sin(th) * np.exp(1j * ph), np.cos(th)

    def projection(self, s):
        return np.sin(self.theta_profile(s)) * np.exp(1j * self.phi_profile(s))

    def projection_derivative(self, s):
        th, ph = self.theta_profile(s), self.phi_profile(s)
        dth, dph = profile_derivative(self.theta_profile, s), profile_derivative(self.phi_profile, s)
        return (np.cos(th) * dth + 1j * np.sin(th) * dph) * np.exp(1j * ph)

    def evaluate(self, s, u):
        th, ph = self.theta_profile(s), self.phi_profile(s)
        u = np.asarray(u, dtype=float)
        z = np.cos(th / 2) * np.exp(1j * (ph / 2 + u))
        w = np.sin(th / 2) * np.exp(1j * (ph / 2 - u))
        return z, w

    def partials(self, s, u):
        th, ph = self.theta_profile(s), self.phi_profile(s)
        dth, dph = profile_derivative(self.theta_profile, s), profile_derivative(self.phi_profile, s)
        u = np.asarray(u, dtype=float)
        ez = np.exp(1j * (ph / 2 + u))
        ew = np.exp(1j * (ph / 2 - u))
        c, sn = np.cos(th / 2), np.sin(th / 2)
        d_s = ((-sn * dth / 2 + 1j * c * dph / 2) * ez, (c * dth / 2 + 1j * sn * dph / 2) * ew)
        d_u = (1j * c * ez, -1j * sn * ew)
        return d_s, d_u

    def params_dict(self) -> dict:
        return {"theta_profile": _profile_dict(self.theta_profile), "phi_profile": _profile_dict(self.phi_profile)}


DEFAULT_SPIN_Z = ComplexProfile(TrigProfile(0.5, (), (1.0,)), TrigProfile(0.25, (), (0.0, 0.5)))
DEFAULT_SPIN_R = TrigProfile(1.0, (0.5,))


@dataclass(frozen=True)
class SpinTorus(SurfaceFamily):
    """(theta, phi) -> (z(theta), r(theta) e^{i phi})."""

    z_profile: Any = DEFAULT_SPIN_Z
    r_profile: Any = DEFAULT_SPIN_R

    name: ClassVar[str] = "spin-torus"
    param_names: ClassVar[tuple[str, str]] = ("theta", "phi")
    domain: ClassVar = ((0.0, TWO_PI, True), (0.0, TWO_PI, True))

    def evaluate(self, theta, phi):
        theta = np.asarray(theta, dtype=float)
        phi = np.asarray(phi, dtype=float)
        z = self.z_profile(theta) * np.ones_like(phi)
        return z, self.r_profile(theta) * np.exp(1j * phi)

    def partials(self, theta, phi):
        theta = np.asarray(theta, dtype=float)
        e = np.exp(1j * np.asarray(phi, dtype=float))
        dz = profile_derivative(self.z_profile, theta) * np.ones_like(e)
        d_theta = (dz, profile_derivative(self.r_profile, theta) * e)
        d_phi = (np.zeros_like(dz), 1j * self.r_profile(theta) * e)
        return d_theta, d_phi

    def params_dict(self) -> dict:
        return {"z_profile": _profile_dict(self.z_profile), "r_profile": _profile_dict(self.r_profile)}


@dataclass(frozen=True)
class TotallyRealDisc(SurfaceFamily):
    """Graph w = conj(z) f(|z|^2) over the closed unit disc, charted by (t = |z|^2, angle)."""

    profile: Any = field(default_factory=DiscProfile)

    name: ClassVar[str] = "disc"
    param_names: ClassVar[tuple[str, str]] = ("t", "angle")
    domain: ClassVar = ((0.0, 1.0, False), (0.0, TWO_PI, True))

    def curve(self, t):
        t = np.asarray(t, dtype=float)
        return t * self.profile(t)

    def curve_derivative(self, t):
        t = np.asarray(t, dtype=float)
        return self.profile(t) + t * profile_derivative(self.profile, t)

    def evaluate(self, t, angle):
        r = np.sqrt(np.asarray(t, dtype=float))
        e = np.exp(1j * np.asarray(angle, dtype=float))
        return r * e, r / e * self.profile(t)

    def partials(self, t, angle):
        t = np.asarray(t, dtype=float)
        r = np.sqrt(t)
        e = np.exp(1j * np.asarray(angle, dtype=float))
        f = self.profile(t)
        df = profile_derivative(self.profile, t)
        with np.errstate(divide="ignore", invalid="ignore"):
            d_t = (e / (2 * r), (f / (2 * r) + r * df) / e)
        d_angle = (1j * r * e, -1j * r * f / e)
        return d_t, d_angle

    def params_dict(self) -> dict:
        return {"profile": _profile_dict(self.profile)}


def _profile_dict(p) -> Any:
    to_dict = getattr(p, "to_dict", None)
    return to_dict() if to_dict else repr(p)


FAMILIES: dict[str, type[SurfaceFamily]] = {
    cls.name: cls for cls in (KleinBottle, KleinStar, HopfTorus, SpinTorus, TotallyRealDisc)
}


def family_from_dict(d: dict) -> SurfaceFamily:
    """Build a family from {"name": ..., "params": {...}}; missing params take defaults."""
    name = d.get("name")
    if name not in FAMILIES:
        raise InvalidParams(f"unknown family {name!r}; choose from {sorted(FAMILIES)}")
    p = dict(d.get("params") or {})
    try:
        if name in ("klein", "klein-star"):
            return FAMILIES[name](float(p.get("a", 2.0)), float(p.get("b", 1.0)))
        if name == "hopf-torus":
            return HopfTorus(
                TrigProfile.from_dict(p["theta_profile"]) if "theta_profile" in p else DEFAULT_HOPF_THETA,
                TrigProfile.from_dict(p["phi_profile"]) if "phi_profile" in p else DEFAULT_HOPF_PHI,
            )
        if name == "spin-torus":
            return SpinTorus(
                ComplexProfile.from_dict(p["z_profile"]) if "z_profile" in p else DEFAULT_SPIN_Z,
                TrigProfile.from_dict(p["r_profile"]) if "r_profile" in p else DEFAULT_SPIN_R,
            )
        return TotallyRealDisc(DiscProfile.from_dict(p["profile"]) if "profile" in p else DiscProfile())
    except (KeyError, TypeError, ValueError) as exc:
        raise InvalidParams(f"bad parameters for {name}: {exc}") from exc


# --- operations --------------------------------------------------------------

def eval_surface(family: SurfaceFamily, u: float, v: float) -> Point2C:
    z, w = family.evaluate(u, v)
    return Point2C(complex(z), complex(w))


def numeric_partials(family: SurfaceFamily, u, v, step: float = FD_STEP):
    zp, wp = family.evaluate(np.add(u, step), v)
    zm, wm = family.evaluate(np.subtract(u, step), v)
    d_u = ((zp - zm) / (2 * step), (wp - wm) / (2 * step))
    zp, wp = family.evaluate(u, np.add(v, step))
    zm, wm = family.evaluate(u, np.subtract(v, step))
    d_v = ((zp - zm) / (2 * step), (wp - wm) / (2 * step))
    return d_u, d_v


def tangent_frame(family: SurfaceFamily, u: float, v: float) -> tuple[Point2C, Point2C]:
    (zu, wu), (zv, wv) = family.partials(u, v)
    frame = (Point2C(complex(zu), complex(wu)), Point2C(complex(zv), complex(wv)))
    for vec in frame:
        norm = math.hypot(abs(vec.z), abs(vec.w))
        if not norm >= 1e-12:
            raise DegeneratePoint(f"partial of norm {norm:.3e} at ({u}, {v})")
    return frame


@dataclass(frozen=True)
class TotalRealityReport:
    family: str
    min_abs_det: float
    argmin: tuple[float, float]
    resolution: int
    passed: bool

    def to_dict(self) -> dict:
        return {
            "family": self.family,
            "min_abs_det": self.min_abs_det,
            "argmin": list(self.argmin),
            "resolution": self.resolution,
            "passed": self.passed,
        }


def tangent_determinant(family: SurfaceFamily, u, v):
    (zu, wu), (zv, wv) = family.partials(u, v)
    return zu * wv - wu * zv


def total_reality_scan(family: SurfaceFamily, n: int = 256, validate: bool = True) -> TotalRealityReport:
    """Minimum of |det[d_u Phi | d_v Phi]| over an n x n parameter grid."""
    if n < 64:
        raise ValueError("total reality scan needs n >= 64")
    if validate:
        validate_family(family)
    U, V = family.grid(n)
    (zu, wu), (zv, wv) = family.partials(U, V)
    norms = np.minimum(np.hypot(np.abs(zu), np.abs(wu)), np.hypot(np.abs(zv), np.abs(wv)))
    if np.min(norms) < 1e-12:
        k = np.unravel_index(np.argmin(norms), norms.shape)
        raise DegeneratePoint(f"degenerate partial at {(float(U[k]), float(V[k]))}")
    det = np.abs(zu * wv - wu * zv)
    k = np.unravel_index(np.argmin(det), det.shape)
    m = float(det[k])
    return TotalRealityReport(family.name, m, (float(U[k]), float(V[k])), n, m > 0)


@dataclass(frozen=True)
class IdentificationReport:
    max_identification_error: float
    min_nonequivalent_distance: float
    resolution: int


def klein_identification_check(family: KleinBottle, n: int = 128) -> IdentificationReport:
    """Checks Phi(theta + pi, -phi) = Phi(theta, phi) and injectivity on the quotient grid."""
    if n % 2:
        raise ValueError("grid size must be even")
    T, P = family.grid(n)
    z1, w1 = family.evaluate(T, P)
    z2, w2 = family.evaluate(T + math.pi, -P)
    err = float(np.max(np.hypot(np.abs(z1 - z2), np.abs(w1 - w2))))

    pts = np.stack([z1.real.ravel(), z1.imag.ravel(), w1.real.ravel(), w1.imag.ravel()], axis=1)
    idx = np.arange(n * n).reshape(n, n)
    partner = idx[(np.arange(n)[:, None] + n // 2) % n, (n - np.arange(n)[None, :]) % n].ravel()
    dist, nbr = cKDTree(pts).query(pts, k=3)
    own = np.arange(n * n)[:, None]
    mask = (nbr != own) & (nbr != partner[:, None])
    return IdentificationReport(err, float(np.min(dist[mask])), n)


def hopf_map(z: complex, w: complex, tol: float = 1e-9) -> tuple[complex, float]:
    """Conjugate Hopf map S^3 -> S^2 in C x R: (z, w) -> (2 z w, |z|^2 - |w|^2)."""
    r = abs(z) ** 2 + abs(w) ** 2
    if abs(r - 1.0) > tol:
        raise NotOnSphere(f"|z|^2 + |w|^2 = {r!r}")
    return complex(2 * z * w), float(abs(z) ** 2 - abs(w) ** 2)


# --- validation ----------------------------------------------------------------

@dataclass
class ValidationReport:
    family: str
    constants: dict
    checks: dict

    def to_dict(self) -> dict:
        return {"family": self.family, "constants": _jsonable(self.constants), "checks": _jsonable(self.checks)}


def _jsonable(d: dict) -> dict:
    out = {}
    for k, v in d.items():
        out[k] = [v.real, v.imag] if isinstance(v, complex) else v
    return out


def _one_double_point(points: list[DoublePoint], what: str) -> DoublePoint:
    if len(points) != 1:
        raise ValidationFailed(f"{what} must have exactly one self-intersection", f"found {len(points)}")
    return points[0]


def _validate_hopf(fam: HopfTorus) -> ValidationReport:
    s = np.linspace(0, TWO_PI, 4096, endpoint=False)
    th = fam.theta_profile(s)
    min_sin = float(np.min(np.sin(th)))
    if min_sin <= 1e-9:
        raise ValidationFailed("projection must avoid the origin", f"min sin(theta) = {min_sin:.3e}")
    speed = min_speed(fam.projection_derivative, 0.0, TWO_PI)
    if speed <= 1e-9:
        raise ValidationFailed("projection must be immersed", f"min speed {speed:.3e}")
    # embeddedness of gamma on S^2, away from index neighbours
    n = 1024
    ss = np.linspace(0, TWO_PI, n, endpoint=False)
    xy, height = fam.sphere_curve(ss)
    P = np.stack([xy.real, xy.imag, height], axis=1)
    D = np.linalg.norm(P[:, None, :] - P[None, :, :], axis=2)
    i = np.arange(n)
    gap = np.abs(i[:, None] - i[None, :])
    gap = np.minimum(gap, n - gap)
    min_self = float(np.min(D[gap >= n // 32]))
    if min_self <= 1e-9:
        raise ValidationFailed("gamma must be embedded in S^2", f"min separation {min_self:.3e}")
    dp = _one_double_point(
        self_intersections(fam.projection, fam.projection_derivative, 0.0, TWO_PI, periodic=True),
        "projected curve",
    )
    h1 = float(np.cos(fam.theta_profile(dp.s1)))
    h2 = float(np.cos(fam.theta_profile(dp.s2)))
    if abs(h1 - h2) <= 1e-9:
        raise ValidationFailed("gamma must be embedded in S^2", "double point of the projection lifts to one point")
    a = dp.point
    if not (0 < abs(a) < 1):
        raise ValidationFailed("self-intersection must lie in the punctured open disc", f"|a| = {abs(a)}")
    return ValidationReport(
        fam.name,
        {"a": a, "s1": dp.s1, "s2": dp.s2, "height1": h1, "height2": h2, "latitude_bound": math.sqrt(1 - abs(a) ** 2)},
        {"min_sin_theta": min_sin, "min_projection_speed": speed, "min_sphere_separation": min_self,
         "double_point_residual": dp.residual},
    )


def _validate_spin(fam: SpinTorus) -> ValidationReport:
    s = np.linspace(0, TWO_PI, 4096, endpoint=False)
    min_r = float(np.min(fam.r_profile(s)))
    if min_r <= 0:
        raise ValidationFailed("r must be positive", f"min r = {min_r:.3e}")
    dz = lambda x: profile_derivative(fam.z_profile, x)  # noqa: E731
    speed = min_speed(dz, 0.0, TWO_PI)
    if speed <= 1e-9:
        raise ValidationFailed("z profile must be immersed", f"min speed {speed:.3e}")
    dp = _one_double_point(self_intersections(fam.z_profile, dz, 0.0, TWO_PI, periodic=True), "z profile")
    r1, r2 = float(fam.r_profile(dp.s1)), float(fam.r_profile(dp.s2))
    if abs(r1 - r2) <= 1e-9:
        raise ValidationFailed("r must differ at the double point", f"r1 = r2 = {r1}")
    return ValidationReport(
        fam.name,
        {"z0": dp.point, "theta1": dp.s1, "theta2": dp.s2, "r1": r1, "r2": r2},
        {"min_r": min_r, "min_speed": speed, "double_point_residual": dp.residual},
    )


def _validate_disc(fam: TotallyRealDisc) -> ValidationReport:
    speed = min_speed(fam.curve_derivative, 0.0, 1.0)
    if speed <= 1e-9:
        raise ValidationFailed("t -> t f(t) must be an immersion", f"min speed {speed:.3e}")
    dp = _one_double_point(
        self_intersections(fam.curve, fam.curve_derivative, 0.0, 1.0, periodic=False), "t -> t f(t)"
    )
    if abs(dp.point) <= 1e-9:
        raise ValidationFailed("double point must be nonzero")
    return ValidationReport(
        fam.name,
        {"t1": dp.s1, "t2": dp.s2, "alpha": dp.point},
        {"min_speed": speed, "double_point_residual": dp.residual},
    )


def _validate_klein(fam: KleinBottle) -> ValidationReport:
    return ValidationReport(
        fam.name,
        {"a": fam.a, "b": fam.b, "inner_radius": fam.inner_radius, "outer_radius": fam.outer_radius},
        {"min_g": fam.a - fam.b},
    )


def validate_family(family: SurfaceFamily) -> ValidationReport:
    """Numerically check a family's hypotheses and return its located constants."""
    if isinstance(family, KleinBottle):
        return _validate_klein(family)
    if isinstance(family, HopfTorus):
        return _validate_hopf(family)
    if isinstance(family, SpinTorus):
        return _validate_spin(family)
    if isinstance(family, TotallyRealDisc):
        return _validate_disc(family)
    raise ValidationFailed("unknown family", type(family).__name__)
