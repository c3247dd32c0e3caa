"""Numeric certificates for the Klein bottle hull and its function algebras.

The attached annulus A = {(z, 0): (a-b)^2 <= |z| <= (a+b)^2} is certified
through the zero-counting route: the holomorphic discs
F_phi(zeta) = (zeta^2 g(phi)^2, zeta g(phi) h(phi)) have boundaries on K,
and for a polynomial P with no zeros on K the zero count of P o F_phi over
the unit disc does not depend on phi.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Callable, Sequence

import numpy as np

from .errors import (
    ContourThroughZero,
    LengthMismatch,
    NonConstant,
    UnderResolved,
    VanishesOnSurface,
)
from .numerics import (
    DEFAULT_TOL,
    ClosedCurveSamples,
    Tolerances,
    adaptive_winding,
    contour_integral,
    least_squares_fit,
)
from .poly import BivariatePolynomial
from .surfaces import KleinBottle, KleinStar

ORIENTATION = "outer circle counterclockwise, inner circle clockwise"
K_WINDOW_NOTE = "holomorphic test functions truncated to the Laurent monomials z^k in the stated k-window"


def _c(x: complex) -> list[float]:
    return [float(x.real), float(x.imag)]


# --- disc family ----------------------------------------------------------------

@dataclass(frozen=True)
class DiscFamily:
    """zeta -> (zeta^2 g(phi)^2, zeta g(phi) h(phi)) on the closed unit disc."""

    phi: float
    klein: KleinBottle = KleinBottle()

    def __call__(self, zeta):
        zeta = np.asarray(zeta, dtype=complex)
        g = self.klein.g(self.phi)
        return zeta * zeta * g * g, zeta * g * self.klein.h(self.phi)

    def boundary(self, s):
        return self(np.exp(1j * np.asarray(s, dtype=float)))


def polynomial_on_disc_boundary(P: BivariatePolynomial, disc: DiscFamily) -> Callable:
    return lambda s: P(*disc.boundary(s))


def annulus_boundary_winding(P: BivariatePolynomial, klein: KleinBottle, tol: Tolerances = DEFAULT_TOL) -> int:
    """Zeros of z -> P(z, 0) inside A: winding on the outer circle minus the inner one."""
    outer = adaptive_winding(lambda s: P(klein.outer_radius * np.exp(1j * s), 0), tol)
    inner = adaptive_winding(lambda s: P(klein.inner_radius * np.exp(1j * s), 0), tol)
    return outer.count - inner.count


def min_abs_on_klein(P: BivariatePolynomial, klein: KleinBottle, n: int = 512) -> tuple[float, tuple[float, float]]:
    """Grid minimum of |P| on K followed by a local polish of the best cells."""
    from scipy.optimize import minimize

    T, F = klein.grid(n)
    vals = np.abs(P(*klein.evaluate(T, F)))
    best = float(np.min(vals))
    arg = (0.0, 0.0)
    flat = np.argsort(vals, axis=None)[:8]
    for k in flat:
        i, j = np.unravel_index(k, vals.shape)
        x0 = np.array([T[i, j], F[i, j]])
        res = minimize(lambda x: float(np.abs(P(*klein.evaluate(x[0], x[1])))), x0, method="Nelder-Mead",
                       options={"xatol": 1e-12, "fatol": 1e-15, "maxiter": 2000})
        val = min(float(res.fun), float(vals[i, j]))
        if val <= best:
            best = val
            arg = (float(res.x[0]), float(res.x[1])) if res.fun <= vals[i, j] else (float(x0[0]), float(x0[1]))
    return best, arg


# --- zero counts ----------------------------------------------------------------

@dataclass
class ZeroCountLedger:
    polynomial: str
    phi_grid: np.ndarray | None = None
    g_raw: np.ndarray | None = None
    g_values: np.ndarray | None = None
    n0: int | None = None
    n0_raw: float | None = None
    n_minus_pi: int | None = None
    n_minus_pi_raw: float | None = None
    n_annulus: int | None = None
    min_abs_on_surface: float | None = None
    notes: list[str] = field(default_factory=list)

    @property
    def identity_residual(self) -> int | None:
        if None in (self.n0, self.n_minus_pi, self.n_annulus):
            return None
        return self.n0 - self.n_minus_pi - 2 * self.n_annulus

    @property
    def implied_annulus_count(self) -> float | None:
        if self.g_values is None:
            return None
        return (int(self.g_values[-1]) - int(self.g_values[0])) / 2

    def to_dict(self) -> dict:
        d = {
            "polynomial": self.polynomial,
            "n0": self.n0,
            "n0_raw": self.n0_raw,
            "n_minus_pi": self.n_minus_pi,
            "n_minus_pi_raw": self.n_minus_pi_raw,
            "n_annulus": self.n_annulus,
            "identity_residual": self.identity_residual,
            "min_abs_on_surface": self.min_abs_on_surface,
            "notes": list(self.notes),
        }
        if self.g_values is not None:
            d["phi_grid"] = [float(x) for x in self.phi_grid]
            d["G_raw"] = [float(x) for x in self.g_raw]
            d["G"] = [int(x) for x in self.g_values]
            d["implied_annulus_count"] = self.implied_annulus_count
        return d


def constancy_certificate(
    P: BivariatePolynomial,
    klein: KleinBottle = KleinBottle(),
    phi_points: int = 256,
    tol: Tolerances = DEFAULT_TOL,
    grid: int = 512,
) -> ZeroCountLedger:
    """Certify that G(phi) = #Z(P o F_phi) is constant on [-pi, 0].

    Raises VanishesOnSurface when P has a zero on K, in which case the
    argument does not apply.
    """
    m, where = min_abs_on_klein(P, klein, grid)
    if m <= 10 * tol.zero_tol:
        raise VanishesOnSurface(f"min |P| on K = {m:.3e} near (theta, phi) = {where}")
    phis = np.linspace(-math.pi, 0.0, phi_points)
    raw = np.empty(phi_points)
    ints = np.empty(phi_points, dtype=int)
    for i, phi in enumerate(phis):
        res = adaptive_winding(polynomial_on_disc_boundary(P, DiscFamily(float(phi), klein)), tol)
        raw[i], ints[i] = res.raw, res.count
    off = np.max(np.abs(raw - ints))
    if off > tol.int_tol:
        raise UnderResolved(f"G deviates {off:.3e} from an integer")
    if np.any(ints != ints[0]):
        bad = int(np.nonzero(ints != ints[0])[0][0])
        raise NonConstant(f"G(-pi) = {ints[0]} but G({phis[bad]:.6f}) = {ints[bad]}")
    n_a = annulus_boundary_winding(P, klein, tol)
    led = ZeroCountLedger(
        str(P), phis, raw, ints, int(ints[-1]), float(raw[-1]), int(ints[0]), float(raw[0]), n_a, m,
    )
    if n_a != 0:
        led.notes.append("direct winding on the annulus boundary is nonzero")
    return led


def annulus_zero_identity(
    P: BivariatePolynomial, klein: KleinBottle = KleinBottle(), tol: Tolerances = DEFAULT_TOL
) -> ZeroCountLedger:
    """Zero counts for n0 - n_{-pi} = 2 n_A.

    Only requires P to be nonzero on the two boundary circles of A (the
    boundary images of F_0 and F_{-pi} trace the same circles twice).
    """
    c0 = adaptive_winding(polynomial_on_disc_boundary(P, DiscFamily(0.0, klein)), tol)
    cpi = adaptive_winding(polynomial_on_disc_boundary(P, DiscFamily(-math.pi, klein)), tol)
    n_a = annulus_boundary_winding(P, klein, tol)
    return ZeroCountLedger(str(P), n0=c0.count, n0_raw=c0.raw, n_minus_pi=cpi.count,
                           n_minus_pi_raw=cpi.raw, n_annulus=n_a)


# --- moments -------------------------------------------------------------------------

def _monomial_selector(m: int):
    return (f"z^{m}", lambda z: z**m)


PSI_SELECTORS: dict[str, Callable] = {
    "conj_z": np.conj,
    "z": lambda z: z,
    "inv_z": lambda z: 1 / z,
    "abs_z": np.abs,
}


def psi_from_name(name: str) -> tuple[str, Callable]:
    """Boundary function by name: conj_z, z, inv_z, abs_z or z^m for an integer m."""
    if name in PSI_SELECTORS:
        return name, PSI_SELECTORS[name]
    if name.startswith("z^"):
        try:
            return _monomial_selector(int(name[2:]))
        except ValueError:
            pass
    raise ValueError(f"unknown boundary function {name!r}")


def annulus_boundary(klein: KleinBottle, samples: int):
    """(points, d/ds) of the outer circle counterclockwise then inner clockwise."""
    s = 2 * math.pi * np.arange(samples) / samples
    R, r = klein.outer_radius, klein.inner_radius
    outer = R * np.exp(1j * s)
    inner = r * np.exp(-1j * s)
    return (outer, 1j * outer), (inner, -1j * inner)


@dataclass
class MomentReport:
    psi: str
    ks: list[int]
    moments: np.ndarray
    normalized: np.ndarray
    samples: int
    arithmetic: str = "double"
    orientation: str = ORIENTATION
    note: str = K_WINDOW_NOTE

    def moment(self, k: int) -> complex:
        return complex(self.moments[self.ks.index(k)])

    def max_modulus(self, exclude: Sequence[int] = (), normalized: bool = False) -> float:
        vals = self.normalized if normalized else self.moments
        keep = [i for i, k in enumerate(self.ks) if k not in exclude]
        return float(np.max(np.abs(vals[keep]))) if keep else 0.0

    def passed(self, tol: float = DEFAULT_TOL.residual_tol, exclude: Sequence[int] = (), normalized: bool = False) -> bool:
        return self.max_modulus(exclude, normalized) < tol

    def to_dict(self) -> dict:
        return {
            "psi": self.psi,
            "k": list(self.ks),
            "moments": [_c(m) for m in self.moments],
            "normalized_moments": [_c(m) for m in self.normalized],
            "max_modulus": self.max_modulus(),
            "max_modulus_normalized": self.max_modulus(normalized=True),
            "samples": self.samples,
            "arithmetic": self.arithmetic,
            "orientation": self.orientation,
            "note": self.note,
        }


def _mp_selector(name: str) -> Callable:
    import mpmath

    if name == "conj_z":
        return mpmath.conj
    if name == "z":
        return lambda z: z
    if name == "inv_z":
        return lambda z: 1 / z
    if name == "abs_z":
        return abs
    m = int(name[2:])
    return lambda z: z**m


def _mp_moments(name: str, ks: list[int], samples: int, klein: KleinBottle, digits: int):
    """The trapezoid sums of the double path, evaluated in ``digits``-digit arithmetic.

    Raw moments against z^k carry the scale (a+b)^(2k+2); on |z| = 9 that
    reaches 1e20 for k near 20, so double rounding of individual samples
    already exceeds any absolute tolerance below 1e4.  The same quadrature
    in extended precision resolves the moment to its true size.
    """
    import mpmath

    fn = _mp_selector(name)
    table = _mp_power_table(tuple(ks), samples, klein.inner_radius, klein.outer_radius, digits)
    raw = np.empty(len(ks), dtype=complex)
    norm = np.empty(len(ks), dtype=complex)
    with mpmath.workdps(digits):
        R, r = mpmath.mpf(klein.outer_radius), mpmath.mpf(klein.inner_radius)
        values = [fn(z) for z in table.points]
        for i, k in enumerate(ks):
            total = mpmath.fdot(values, table.weights[i])
            raw[i] = complex(total)
            norm[i] = complex(total / max(R**k, r**k))
    return raw, norm


@dataclass(frozen=True)
class _PowerTable:
    points: list
    weights: list


@lru_cache(maxsize=8)
def _mp_power_table(ks: tuple, samples: int, inner: float, outer: float, digits: int) -> _PowerTable:
    """Quadrature points of both circles and the weights z^k dz/ds * 2 pi / samples."""
    import mpmath

    with mpmath.workdps(digits):
        h = 2 * mpmath.pi / samples
        points, base = [], []
        for radius, sense in ((mpmath.mpf(outer), 1), (mpmath.mpf(inner), -1)):
            for j in range(samples):
                z = radius * mpmath.expjpi(mpmath.mpf(2 * sense * j) / samples)
                points.append(z)
                base.append(1j * sense * z * h * z ** ks[0])
        weights = []
        cur = base
        for i in range(len(ks)):
            weights.append(cur)
            cur = [c * z for c, z in zip(cur, points)]
    return _PowerTable(points, weights)


def moment_report(
    psi: str | Callable | tuple,
    k_min: int = -16,
    k_max: int = 16,
    samples: int = 2048,
    klein: KleinBottle = KleinBottle(),
    digits: int | None = 40,
) -> MomentReport:
    """Moments of psi against z^k over the oriented boundary of A.

    ``psi`` may be a selector name, a callable of z, or a pair of sample
    arrays (outer, inner) on the quadrature grid.  Besides the raw moments
    the report lists moments against z^k / sup_A |z^k|, which are the ones
    with a scale-free meaning when k is large.

    Named selectors are summed in ``digits``-digit arithmetic (double when
    ``digits`` is None); callables and samples always use double precision.
    """
    ks = list(range(k_min, k_max + 1))
    if isinstance(psi, str) and digits is not None:
        label, _ = psi_from_name(psi)
        raw, norm = _mp_moments(label, ks, samples, klein, digits)
        return MomentReport(label, ks, raw, norm, samples, f"{digits}-digit")
    (zo, dzo), (zi, dzi) = annulus_boundary(klein, samples)
    if isinstance(psi, str):
        label, fn = psi_from_name(psi)
        po, pi = fn(zo), fn(zi)
    elif callable(psi):
        label, po, pi = getattr(psi, "__name__", "callable"), psi(zo), psi(zi)
    else:
        po, pi = (np.asarray(x, dtype=complex) for x in psi)
        label = "samples"
        if po.size != samples or pi.size != samples:
            raise LengthMismatch(f"psi samples {po.size}, {pi.size} do not match quadrature {samples}")
    po = np.broadcast_to(np.asarray(po, dtype=complex), zo.shape)
    pi = np.broadcast_to(np.asarray(pi, dtype=complex), zi.shape)
    co, ci = ClosedCurveSamples(zo), ClosedCurveSamples(zi)
    raw = np.empty(len(ks), dtype=complex)
    norm = np.empty(len(ks), dtype=complex)
    R, r = klein.outer_radius, klein.inner_radius
    for i, k in enumerate(ks):
        raw[i] = contour_integral(co, po * zo**k, dzo) + contour_integral(ci, pi * zi**k, dzi)
        sup = max(R**k, r**k)
        norm[i] = (contour_integral(co, po * (zo / R) ** k, dzo) * (R**k / sup)
                   + contour_integral(ci, pi * (zi / r) ** k, dzi) * (r**k / sup))
    return MomentReport(label, ks, raw, norm, samples)


def expected_moment(psi: str, k: int, klein: KleinBottle = KleinBottle()) -> complex | None:
    """Closed-form moment for the named boundary functions, None when unknown.

    Laurent polynomials integrate to zero over the oriented boundary.  On a
    circle of radius r, conj(z) = r^2/z, so only k = 0 survives, with value
    2 pi i (R^2 - r^2).
    """
    name, _ = psi_from_name(psi)
    if name == "conj_z":
        return 2j * math.pi * (klein.outer_radius**2 - klein.inner_radius**2) if k == 0 else 0j
    if name in ("z", "inv_z") or name.startswith("z^"):
        return 0j
    return None


# --- Laurent gap -----------------------------------------------------------------------

@dataclass
class LaurentGapReport:
    target: str
    radii: tuple[float, ...]
    samples_per_circle: int
    rows: list[tuple[int, float, complex]]

    def residuals(self) -> dict[int, float]:
        return {n: r for n, r, _ in self.rows}

    def to_dict(self) -> dict:
        return {
            "target": self.target,
            "radii": list(self.radii),
            "samples_per_circle": self.samples_per_circle,
            "normalization": "unit mass per circle",
            "rows": [{"N": n, "residual": r, "coefficient_z^-1": _c(c)} for n, r, c in self.rows],
        }


def laurent_gap(
    target: str | Callable = "conj_z",
    radii: Sequence[float] = (1.0, 9.0),
    Ns: Sequence[int] = (1, 2, 4, 8, 16, 32),
    samples: int = 256,
) -> LaurentGapReport:
    """Best L2 approximation of ``target`` by {z^j : |j| <= N} on circles."""
    if max(Ns) > 64:
        raise ValueError("N must not exceed 64")
    if 2 * max(Ns) + 1 > samples:
        raise ValueError("too few samples per circle for the requested N")
    if isinstance(target, str):
        label, fn = psi_from_name(target)
    else:
        label, fn = getattr(target, "__name__", "callable"), target
    s = 2 * math.pi * np.arange(samples) / samples
    z = np.concatenate([r * np.exp(1j * s) for r in radii])
    w = np.full(z.size, 1.0 / samples)
    y = fn(z)
    rows = []
    for N in Ns:
        js = np.arange(-N, N + 1)
        fit = least_squares_fit(z[:, None] ** js[None, :], y, w)
        rows.append((int(N), fit.residual, complex(fit.coefficients[N - 1])))
    return LaurentGapReport(label, tuple(float(r) for r in radii), samples, rows)


# --- exponent lattice ---------------------------------------------------------------------

@dataclass
class LatticeReport:
    j_range: tuple[int, int]
    l_range: tuple[int, int]
    window: tuple[int, int]
    reachable: list[int]
    missing: list[int]

    @property
    def covered(self) -> bool:
        return not self.missing

    def to_dict(self) -> dict:
        return {"j_range": list(self.j_range), "l_range": list(self.l_range), "window": list(self.window),
                "reachable": self.reachable, "missing": self.missing, "covered": self.covered}


def exponent_lattice(j_range: tuple[int, int], l_range: tuple[int, int], window: tuple[int, int]) -> LatticeReport:
    """theta-frequencies 2j + l reachable by z^j w^l restricted to a fiber circle."""
    if l_range[0] < 0:
        raise ValueError("powers of w must be nonnegative")
    lo, hi = window
    freqs = {2 * j + l for j in range(j_range[0], j_range[1] + 1) for l in range(l_range[0], l_range[1] + 1)}
    inside = sorted(f for f in freqs if lo <= f <= hi)
    missing = sorted(set(range(lo, hi + 1)) - set(inside))
    return LatticeReport(tuple(j_range), tuple(l_range), tuple(window), inside, missing)


# --- automorphism -------------------------------------------------------------------------

def J(z, w):
    return z, w / z


def J_inverse(z, w):
    return z, z * w


@dataclass
class AutomorphismReport:
    max_image_error: float
    max_annulus_error: float
    max_roundtrip_error: float
    grid: int
    annulus_samples: int
    random_points: int
    tol: float = 1e-12

    @property
    def passed(self) -> bool:
        return max(self.max_image_error, self.max_annulus_error, self.max_roundtrip_error) < self.tol

    def to_dict(self) -> dict:
        return {
            "max_image_error": self.max_image_error,
            "max_annulus_error": self.max_annulus_error,
            "max_roundtrip_error": self.max_roundtrip_error,
            "grid": self.grid,
            "annulus_samples": self.annulus_samples,
            "random_points": self.random_points,
            "tol": self.tol,
            "passed": self.passed,
        }


def automorphism_check(
    klein: KleinBottle = KleinBottle(),
    grid: int = 256,
    annulus_samples: int = 64,
    random_points: int = 1000,
    seed: int = 0,
) -> AutomorphismReport:
    """J(z, w) = (z, w/z) maps K onto K* and fixes A pointwise."""
    star = KleinStar(klein.a, klein.b)
    T, F = klein.grid(grid)
    jz, jw = J(*klein.evaluate(T, F))
    sz, sw = star.evaluate(T, F)
    image = float(max(np.max(np.abs(jz - sz)), np.max(np.abs(jw - sw))))

    rng = np.random.default_rng(seed)
    rho = np.sqrt(rng.uniform(klein.inner_radius, klein.outer_radius, annulus_samples))
    za = rho**2 * np.exp(1j * rng.uniform(0, 2 * math.pi, annulus_samples))
    az, aw = J(za, np.zeros_like(za))
    annulus = float(max(np.max(np.abs(az - za)), np.max(np.abs(aw))))

    z = rng.uniform(1, 10, random_points) * np.exp(1j * rng.uniform(0, 2 * math.pi, random_points))
    w = rng.normal(size=random_points) + 1j * rng.normal(size=random_points)
    rz, rw = J(*J_inverse(z, w))
    qz, qw = J_inverse(*J(z, w))
    roundtrip = float(max(np.max(np.abs(rz - z)), np.max(np.abs(rw - w)),
                          np.max(np.abs(qz - z)), np.max(np.abs(qw - w))))
    return AutomorphismReport(image, annulus, roundtrip, grid, annulus_samples, random_points)


def two_to_one_winding(klein: KleinBottle = KleinBottle(), tol: Tolerances = DEFAULT_TOL) -> tuple[int, int]:
    """Winding of z o F_phi about 0 on the unit circle, for phi = 0 and -pi."""
    out = []
    for phi in (0.0, -math.pi):
        disc = DiscFamily(phi, klein)
        out.append(adaptive_winding(lambda s: disc.boundary(s)[0], tol).count)
    return out[0], out[1]
