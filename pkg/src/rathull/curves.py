"""Plane curve helpers: self-intersection location and immersion checks."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np

ComplexFn = Callable[[np.ndarray], np.ndarray]


@dataclass(frozen=True)
class DoublePoint:
    s1: float
    s2: float
    point: complex
    residual: float


def _cross(a, b):
    return (np.conj(a) * b).imag


def _candidate_pairs(points: np.ndarray, periodic: bool, block: int = 256):
    n_seg = points.size if periodic else points.size - 1
    start = points[:n_seg]
    d = (np.roll(points, -1) if periodic else points[1:])[:n_seg] - start
    out = []
    for i0 in range(0, n_seg, block):
        i = np.arange(i0, min(i0 + block, n_seg))[:, None]
        j = np.arange(n_seg)[None, :]
        keep = j >= i + 2
        if periodic:
            keep &= ~((i == 0) & (j == n_seg - 1))
        denom = _cross(d[i], d[j])
        with np.errstate(divide="ignore", invalid="ignore"):
            diff = start[j] - start[i]
            lam = _cross(diff, d[j]) / denom
            mu = _cross(diff, d[i]) / denom
        eps = 1e-9
        hit = keep & (denom != 0) & (lam >= -eps) & (lam <= 1 + eps) & (mu >= -eps) & (mu <= 1 + eps)
        ii, jj = np.nonzero(hit)
        for a, b in zip(ii + i0, jj):
            out.append((a, b, lam[a - i0, b], mu[a - i0, b]))
    return out


def _newton_pair(c: ComplexFn, dc: ComplexFn, s1: float, s2: float, iters: int = 60):
    for _ in range(iters):
        f = complex(c(np.array([s1]))[0] - c(np.array([s2]))[0])
        if abs(f) < 1e-15:
            break
        d1 = complex(dc(np.array([s1]))[0])
        d2 = complex(dc(np.array([s2]))[0])
        jac = np.array([[d1.real, -d2.real], [d1.imag, -d2.imag]])
        try:
            step = np.linalg.solve(jac, [-f.real, -f.imag])
        except np.linalg.LinAlgError:
            break
        s1 += step[0]
        s2 += step[1]
        if np.hypot(*step) < 1e-15:
            break
    f = abs(complex(c(np.array([s1]))[0] - c(np.array([s2]))[0]))
    return s1, s2, f


def self_intersections(
    c: ComplexFn,
    dc: ComplexFn,
    start: float,
    stop: float,
    periodic: bool,
    samples: int = 1024,
    tol: float = 1e-10,
) -> list[DoublePoint]:
    """Transversal self-intersections of a plane curve ``c`` on [start, stop].

    Segment crossings of a polyline approximation seed a Newton solve of
    c(s1) = c(s2) in the two parameters.  Results are deduplicated and
    returned with s1 < s2.
    """
    period = stop - start
    if periodic:
        s = start + period * np.arange(samples) / samples
    else:
        s = np.linspace(start, stop, samples + 1)
    h = s[1] - s[0]
    pts = c(s)

    def close(x, y):
        d = abs(x - y)
        return min(d, period - d) < 1e-7 if periodic else d < 1e-7

    found: list[DoublePoint] = []
    for i, j, lam, mu in _candidate_pairs(pts, periodic):
        a, b, res = _newton_pair(c, dc, s[i] + lam * h, s[j] + mu * h)
        if res > tol:
            continue
        if periodic:
            a = start + (a - start) % period
            b = start + (b - start) % period
            a = start if stop - a < 1e-12 else a
            b = start if stop - b < 1e-12 else b
        elif not (start - 1e-12 <= min(a, b) and max(a, b) <= stop + 1e-12):
            continue
        gap = abs(a - b)
        if periodic:
            gap = min(gap, period - gap)
        if gap < 1e-6:
            continue
        a, b = min(a, b), max(a, b)
        if any(close(a, p.s1) and close(b, p.s2) or close(a, p.s2) and close(b, p.s1) for p in found):
            continue
        found.append(DoublePoint(float(a), float(b), complex(c(np.array([a]))[0]), float(res)))
    return found


def min_speed(dc: ComplexFn, start: float, stop: float, samples: int = 4096) -> float:
    s = np.linspace(start, stop, samples)
    return float(np.min(np.abs(dc(s))))
