"""Bivariate polynomials over C stored as sparse coefficient tables."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Mapping

import numpy as np


@dataclass(frozen=True)
class BivariatePolynomial:
    """sum of c[j, k] z^j w^k with j, k >= 0."""

    terms: tuple[tuple[int, int, complex], ...]

    def __init__(self, coeffs: Mapping[tuple[int, int], complex] | Iterable = ()):
        table: dict[tuple[int, int], complex] = {}
        items = coeffs.items() if isinstance(coeffs, Mapping) else ((tuple(t[:2]), t[2]) for t in coeffs)
        for (j, k), c in items:
            j, k = int(j), int(k)
            if j < 0 or k < 0:
                raise ValueError("exponents must be nonnegative")
            c = complex(c)
            if c != 0:
                table[(j, k)] = table.get((j, k), 0) + c
        object.__setattr__(self, "terms", tuple(sorted((j, k, c) for (j, k), c in table.items() if c != 0)))

    def __call__(self, z, w):
        z = np.asarray(z, dtype=complex)
        w = np.asarray(w, dtype=complex)
        out = np.zeros(np.broadcast(z, w).shape, dtype=complex)
        for j, k, c in self.terms:
            out = out + c * z**j * w**k
        return out

    @property
    def is_zero(self) -> bool:
        return not self.terms

    def coefficient(self, j: int, k: int) -> complex:
        for a, b, c in self.terms:
            if (a, b) == (j, k):
                return c
        return 0j

    def to_terms(self) -> list[list[float]]:
        return [[j, k, c.real, c.imag] for j, k, c in self.terms]

    @classmethod
    def from_terms(cls, rows) -> "BivariatePolynomial":
        """Rows of [j, k, re] or [j, k, re, im]."""
        out = {}
        for row in rows:
            j, k, re = row[0], row[1], row[2]
            im = row[3] if len(row) > 3 else 0.0
            out[(int(j), int(k))] = out.get((int(j), int(k)), 0) + complex(re, im)
        return cls(out)

    def compose_monomial(self, cz: complex, ez: int, cw: complex, ew: int) -> dict[int, complex]:
        """Laurent coefficients in u of P(cz u^ez, cw u^ew)."""
        out: dict[int, complex] = {}
        for j, k, c in self.terms:
            coeff = c * (cz**j if j else 1) * (cw**k if k else 1)
            if coeff != 0:
                n = j * ez + k * ew
                out[n] = out.get(n, 0) + coeff
        return {n: c for n, c in out.items() if c != 0}

    def __str__(self) -> str:
        if not self.terms:
            return "0"
        parts = []
        for j, k, c in self.terms:
            mono = "".join(
                s for s in (
                    "" if j == 0 else ("z" if j == 1 else f"z^{j}"),
                    "" if k == 0 else ("w" if k == 1 else f"w^{k}"),
                )
            )
            coef = _fmt(c)
            if not mono:
                parts.append(coef)
            elif c == 1:
                parts.append(mono)
            else:
                parts.append(f"{coef}*{mono}")
        return " + ".join(parts)


def _fmt(c: complex) -> str:
    if c.imag == 0:
        return f"{c.real:g}"
    if c.real == 0:
        return f"{c.imag:g}i"
    return f"({c.real:g}{c.imag:+g}i)"


def monomial(j: int, k: int, c: complex = 1.0) -> BivariatePolynomial:
    return BivariatePolynomial({(j, k): c})


Z = monomial(1, 0)
W = monomial(0, 1)
ONE = monomial(0, 0)


def linear(cz: complex = 0, cw: complex = 0, c0: complex = 0) -> BivariatePolynomial:
    """cz z + cw w + c0."""
    return BivariatePolynomial({(1, 0): cz, (0, 1): cw, (0, 0): c0})


def laurent_roots(coeffs: Mapping[int, complex], include_origin: bool) -> list[complex]:
    """Distinct zeros of a Laurent polynomial sum c_n u^n.

    u = 0 is reported only when ``include_origin`` and the polynomial part
    vanishes there.
    """
    if not coeffs:
        raise ValueError("identically zero")
    lo, hi = min(coeffs), max(coeffs)
    dense = np.array([coeffs.get(n, 0) for n in range(hi, lo - 1, -1)], dtype=complex)
    roots = [complex(r) for r in np.roots(dense)] if hi > lo else []
    out = [r for r in roots if abs(r) > 1e-14]
    if include_origin and lo > 0:
        out.append(0j)
    return out
