"""Numerical substrate: periodic quadrature, winding numbers, zero counts,
bracketed root finding and weighted least squares.

Everything here is a pure function of its inputs.  Closed curves are
represented by uniform samples in a 2*pi-periodic parameter, and all
contour integrals use the trapezoidal rule in that parameter, which is
spectrally accurate for the real-analytic curves used throughout the
package.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, NamedTuple, Sequence

import numpy as np
from scipy import optimize

from .errors import (
    ContourThroughZero,
    LengthMismatch,
    NegativeCount,
    NoSignChange,
    RankDeficient,
    UnderResolved,
)

MIN_SAMPLES = 16
TWO_PI = 2.0 * np.pi


@dataclass(frozen=True)
class Tolerances:
    zero_tol: float = 1e-9
    int_tol: float = 1e-6
    residual_tol: float = 1e-6

    def __post_init__(self):
        for name in ("zero_tol", "int_tol", "residual_tol"):
            if not getattr(self, name) > 0:
                raise ValueError(f"{name} must be strictly positive")

    def replace(self, **overrides) -> "Tolerances":
        values = {k: getattr(self, k) for k in ("zero_tol", "int_tol", "residual_tol")}
        values.update({k: v for k, v in overrides.items() if v is not None})
        return Tolerances(**values)


DEFAULT_TOL = Tolerances()


@dataclass(frozen=True, eq=False)
class ClosedCurveSamples:
    """Uniform samples of a closed curve; sample ``count`` wraps to sample 0."""

    values: np.ndarray

    def __post_init__(self):
        arr = np.asarray(self.values, dtype=complex).ravel()
        if arr.size < MIN_SAMPLES:
            raise ValueError(f"closed curve needs at least {MIN_SAMPLES} samples, got {arr.size}")
        object.__setattr__(self, "values", arr)

    @property
    def count(self) -> int:
        return int(self.values.size)

    @staticmethod
    def parameters(count: int) -> np.ndarray:
        return TWO_PI * np.arange(count) / count

    @classmethod
    def from_function(cls, fn: Callable[[np.ndarray], np.ndarray], count: int) -> "ClosedCurveSamples":
        return cls(fn(cls.parameters(count)))

    def rotated(self, shift: int) -> "ClosedCurveSamples":
        return ClosedCurveSamples(np.roll(self.values, shift))


def _as_curve(curve) -> ClosedCurveSamples:
    return curve if isinstance(curve, ClosedCurveSamples) else ClosedCurveSamples(curve)


def phase_increments(curve: ClosedCurveSamples) -> np.ndarray:
    v = curve.values
    return np.angle(np.roll(v, -1) / v)


def winding_value(curve: ClosedCurveSamples, tol: Tolerances = DEFAULT_TOL) -> float:
    """Total phase change around the curve divided by 2*pi, before rounding."""
    curve = _as_curve(curve)
    m = np.min(np.abs(curve.values))
    if m <= tol.zero_tol:
        raise ContourThroughZero(f"min |value| = {m:.3e} <= zero_tol = {tol.zero_tol:.1e}")
    steps = phase_increments(curve)
    worst = np.max(np.abs(steps))
    if worst >= np.pi:
        raise UnderResolved(f"phase step {worst:.3f} >= pi; resample the curve more densely")
    return float(np.sum(steps) / TWO_PI)


def winding_number(curve: ClosedCurveSamples, tol: Tolerances = DEFAULT_TOL) -> int:
    raw = winding_value(curve, tol)
    n = int(round(raw))
    if abs(raw - n) > tol.int_tol:
        raise UnderResolved(f"winding {raw!r} is not within {tol.int_tol} of an integer")
    return n


class AdaptiveWinding(NamedTuple):
    count: int
    raw: float
    samples: int


def adaptive_winding(
    fn: Callable[[np.ndarray], np.ndarray],
    tol: Tolerances = DEFAULT_TOL,
    start: int = 256,
    max_samples: int = 1 << 20,
) -> AdaptiveWinding:
    """Winding number of ``fn`` over [0, 2*pi) with dyadic refinement.

    The sample count doubles until every phase increment is below pi/2.
    """
    n = max(start, MIN_SAMPLES)
    while True:
        curve = ClosedCurveSamples.from_function(fn, n)
        m = np.min(np.abs(curve.values))
        if m <= tol.zero_tol:
            raise ContourThroughZero(f"min |value| = {m:.3e} <= zero_tol = {tol.zero_tol:.1e}")
        if np.max(np.abs(phase_increments(curve))) < np.pi / 2:
            raw = winding_value(curve, tol)
            return AdaptiveWinding(winding_number(curve, tol), raw, n)
        if 2 * n > max_samples:
            raise UnderResolved(f"phase increments still >= pi/2 at {n} samples")
        n *= 2


def spectral_derivative(values: np.ndarray) -> np.ndarray:
    """d/d(theta) of uniformly sampled 2*pi-periodic data via the FFT."""
    values = np.asarray(values, dtype=complex)
    n = values.size
    k = np.fft.fftfreq(n, d=1.0 / n)
    if n % 2 == 0:
        k[n // 2] = 0.0
    return np.fft.ifft(1j * k * np.fft.fft(values))


def contour_integral(
    curve: ClosedCurveSamples,
    integrand_values: Sequence[complex],
    derivative: Sequence[complex] | None = None,
) -> complex:
    """Trapezoidal approximation of the closed contour integral of g(z) dz.

    ``derivative`` holds dz/dtheta at the sample parameters when it is known
    in closed form; otherwise it is obtained by spectral differentiation.
    """
    curve = _as_curve(curve)
    g = np.asarray(integrand_values, dtype=complex).ravel()
    if g.size != curve.count:
        raise LengthMismatch(f"{g.size} integrand samples for a {curve.count}-sample curve")
    if derivative is None:
        dz = spectral_derivative(curve.values)
    else:
        dz = np.asarray(derivative, dtype=complex).ravel()
        if dz.size != curve.count:
            raise LengthMismatch(f"{dz.size} derivative samples for a {curve.count}-sample curve")
    return complex(np.sum(g * dz) * (TWO_PI / curve.count))


def zero_count(boundary_image: ClosedCurveSamples, tol: Tolerances = DEFAULT_TOL) -> int:
    """Zeros (with multiplicity) inside a contour, from the winding of the boundary image."""
    n = winding_number(boundary_image, tol)
    if n < 0:
        raise NegativeCount(f"winding {n} < 0: not the boundary image of a holomorphic function")
    return n


def find_root_1d(fn: Callable[[float], float], bracket: tuple[float, float], tol: float = 1e-12) -> float:
    """Root of a continuous scalar function on a sign-changing bracket (Brent)."""
    a, b = float(bracket[0]), float(bracket[1])
    fa, fb = fn(a), fn(b)
    if fa == 0.0:
        return a
    if fb == 0.0:
        return b
    if np.sign(fa) == np.sign(fb):
        raise NoSignChange(f"f({a}) = {fa:.3e} and f({b}) = {fb:.3e} have the same sign")
    return float(optimize.brentq(fn, a, b, xtol=tol, maxiter=200))


class LeastSquaresFit(NamedTuple):
    coefficients: np.ndarray
    residual: float


def least_squares_fit(basis_samples, target_samples, weights) -> LeastSquaresFit:
    """Weighted discrete L2 best approximation of ``target`` by basis columns.

    Columns are equilibrated before an SVD-based solve, so the rank test
    measures the Gram matrix of the normalised basis rather than raw scale.
    """
    B = np.asarray(basis_samples, dtype=complex)
    if B.ndim == 1:
        B = B[:, None]
    y = np.asarray(target_samples, dtype=complex).ravel()
    w = np.asarray(weights, dtype=float).ravel()
    if not (B.shape[0] == y.size == w.size):
        raise LengthMismatch(f"basis rows {B.shape[0]}, target {y.size}, weights {w.size}")
    if np.any(w <= 0):
        raise ValueError("weights must be positive")
    sw = np.sqrt(w)
    A = B * sw[:, None]
    scale = np.linalg.norm(A, axis=0)
    if np.any(scale == 0):
        raise RankDeficient("basis contains a column that vanishes on every sample")
    A = A / scale
    rcond = max(A.shape) * np.finfo(float).eps
    sol, _, rank, sv = np.linalg.lstsq(A, y * sw, rcond=rcond)
    if rank < A.shape[1]:
        raise RankDeficient(f"rank {rank} < {A.shape[1]} columns (smallest singular value {sv[-1]:.3e})")
    coeffs = sol / scale
    resid = float(np.linalg.norm(sw * (y - B @ coeffs)))
    return LeastSquaresFit(coeffs, resid)
