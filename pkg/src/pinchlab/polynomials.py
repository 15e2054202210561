"""Sparse homogeneous polynomials on R^n with exact coefficients.

These are the coordinate representation of spherical harmonics: a polynomial
is a map from exponent vectors (tuples of non-negative ints summing to the
degree) to coefficients.  Coefficients are ints or Fractions in exact mode and
floats in double mode; zero coefficients are never stored.

Conventions used throughout the package:

* the sphere S^{n-1} carries the unnormalized surface measure, and exact
  integrals are returned in units of vol(S^{n-1});
* on the sphere |v|^2 = 1, so a polynomial may be freely multiplied by |x|^2
  without changing its restriction; degree bookkeeping tracks the homogeneous
  representative actually stored.
"""

from __future__ import annotations

import math
from fractions import Fraction

import numpy as np

from ._intquad import (
    PackedPoly,
    monomial_exponents,
    monomial_weight_numerator,
    pair_integral,
    poly_integral,
    weight_denominator,
)

__all__ = [
    "HomogeneousPolynomial",
    "monomial_sphere_integral",
    "monomial_sphere_integral_value",
    "sphere_volume",
    "monomial_exponents",
]


def sphere_volume(n: int) -> float:
    """vol(S^{n-1}) = 2 pi^{n/2} / Gamma(n/2)."""
    return 2.0 * math.pi ** (n / 2.0) / math.gamma(n / 2.0)


def monomial_sphere_integral(n: int, alpha) -> Fraction:
    """Exact sphere integral of x^alpha in units of vol(S^{n-1}).

    Zero when any exponent is odd; otherwise the rational
    prod_i (alpha_i - 1)!! / [n (n+2) ... (n+|alpha|-2)].
    """
    if n < 2:
        raise ValueError("n must be >= 2")
    if any(a < 0 for a in alpha):
        raise ValueError("exponents must be non-negative")
    num = monomial_weight_numerator(tuple(alpha))
    if num == 0:
        return Fraction(0)
    return Fraction(num, weight_denominator(n, sum(alpha)))


def monomial_sphere_integral_value(n: int, alpha) -> float:
    """Float value of the sphere integral of x^alpha (unnormalized measure)."""
    return float(monomial_sphere_integral(n, alpha)) * sphere_volume(n)


class HomogeneousPolynomial:
    """A homogeneous polynomial, stored sparsely as {exponent tuple: coefficient}."""

    __slots__ = ("n", "degree", "terms")

    def __init__(self, n: int, degree: int, terms: dict | None = None):
        self.n = n
        self.degree = degree
        self.terms = {}
        if terms:
            for m, c in terms.items():
                if c == 0:
                    continue
                if len(m) != n:
                    raise ValueError(f"exponent tuple {m} has length != {n}")
                if sum(m) != degree:
                    raise ValueError(f"exponent tuple {m} does not sum to degree {degree}")
                self.terms[tuple(m)] = c

    # -- constructors -------------------------------------------------------

    @classmethod
    def zero(cls, n: int, degree: int = 0) -> "HomogeneousPolynomial":
        return cls(n, degree, {})

    @classmethod
    def coordinate(cls, n: int, i: int) -> "HomogeneousPolynomial":
        e = [0] * n
        e[i] = 1
        return cls(n, 1, {tuple(e): 1})

    @classmethod
    def radius_squared(cls, n: int) -> "HomogeneousPolynomial":
        terms = {}
        for i in range(n):
            e = [0] * n
            e[i] = 2
            terms[tuple(e)] = 1
        return cls(n, 2, terms)

    # -- structure ----------------------------------------------------------

    def is_zero(self) -> bool:
        return not self.terms

    def __eq__(self, other):
        if not isinstance(other, HomogeneousPolynomial):
            return NotImplemented
        return self.n == other.n and self.terms == other.terms

    def __hash__(self):
        return hash((self.n, tuple(sorted(self.terms.items()))))

    def __repr__(self):
        if not self.terms:
            return f"HomogeneousPolynomial({self.n}, {self.degree}, 0)"
        parts = []
        for m, c in sorted(self.terms.items())[:4]:
            mono = "*".join(f"x{i}^{e}" if e > 1 else f"x{i}" for i, e in enumerate(m) if e)
            parts.append(f"{c}*{mono}" if mono else str(c))
        more = "" if len(self.terms) <= 4 else f" + ({len(self.terms) - 4} more)"
        return f"HomogeneousPolynomial({self.n}, deg {self.degree}: {' + '.join(parts)}{more})"

    # -- arithmetic ----------------------------------------------------------

    def __add__(self, other: "HomogeneousPolynomial") -> "HomogeneousPolynomial":
        if self.is_zero():
            return other
        if other.is_zero():
            return self
        if other.degree != self.degree or other.n != self.n:
            raise ValueError("can only add homogeneous polynomials of equal degree and dimension")
        terms = dict(self.terms)
        for m, c in other.terms.items():
            s = terms.get(m, 0) + c
            if s == 0:
                terms.pop(m, None)
            else:
                terms[m] = s
        return HomogeneousPolynomial(self.n, self.degree, terms)

    def __sub__(self, other: "HomogeneousPolynomial") -> "HomogeneousPolynomial":
        return self + other.scale(-1)

    def scale(self, s) -> "HomogeneousPolynomial":
        if s == 0:
            return HomogeneousPolynomial.zero(self.n, self.degree)
        return HomogeneousPolynomial(self.n, self.degree, {m: c * s for m, c in self.terms.items()})

    def __mul__(self, other: "HomogeneousPolynomial") -> "HomogeneousPolynomial":
        if self.is_zero() or other.is_zero():
            return HomogeneousPolynomial.zero(self.n, self.degree + other.degree)
        out: dict = {}
        for m1, c1 in self.terms.items():
            for m2, c2 in other.terms.items():
                m = tuple(a + b for a, b in zip(m1, m2))
                s = out.get(m, 0) + c1 * c2
                if s == 0:
                    out.pop(m, None)
                else:
                    out[m] = s
        return HomogeneousPolynomial(self.n, self.degree + other.degree, out)

    def diff(self, i: int) -> "HomogeneousPolynomial":
        """Partial derivative with respect to x_i."""
        out: dict = {}
        for m, c in self.terms.items():
            if m[i]:
                mm = list(m)
                mm[i] -= 1
                key = tuple(mm)
                s = out.get(key, 0) + c * m[i]
                if s == 0:
                    out.pop(key, None)
                else:
                    out[key] = s
        return HomogeneousPolynomial(self.n, max(self.degree - 1, 0), out)

    def laplacian(self) -> "HomogeneousPolynomial":
        out: dict = {}
        for m, c in self.terms.items():
            for i, e in enumerate(m):
                if e >= 2:
                    mm = list(m)
                    mm[i] -= 2
                    key = tuple(mm)
                    s = out.get(key, 0) + c * e * (e - 1)
                    if s == 0:
                        out.pop(key, None)
                    else:
                        out[key] = s
        return HomogeneousPolynomial(self.n, max(self.degree - 2, 0), out)

    def times_coord(self, i: int) -> "HomogeneousPolynomial":
        """Multiplication by x_i."""
        out = {}
        for m, c in self.terms.items():
            mm = list(m)
            mm[i] += 1
            out[tuple(mm)] = c
        return HomogeneousPolynomial(self.n, self.degree + 1, out)

    # -- exact quadrature ----------------------------------------------------

    def sphere_integral(self) -> Fraction:
        """Exact integral over S^{n-1} in units of vol(S^{n-1})."""
        return poly_integral(self.terms, self.n)

    def sphere_inner(self, other: "HomogeneousPolynomial") -> Fraction:
        """Exact L^2(S^{n-1}) pairing, in units of vol(S^{n-1})."""
        num, den = _integer_parts(self)
        num2, den2 = _integer_parts(other)
        val = pair_integral(num, num2)
        return val / (den * den2)

    # -- numeric evaluation ---------------------------------------------------

    def evaluate_exact(self, point):
        """Evaluate at a point with int/Fraction entries, exactly."""
        total = 0
        for m, c in self.terms.items():
            term = c
            for i, e in enumerate(m):
                if e:
                    term = term * point[i] ** e
            total = total + term
        return total

    def evaluate(self, points: np.ndarray) -> np.ndarray:
        """Evaluate at an (m, n) array of points; returns an (m,) float array."""
        pts = np.asarray(points, dtype=float)
        if pts.ndim == 1:
            pts = pts[None, :]
        acc = np.zeros(pts.shape[0])
        for m, c in self.terms.items():
            term = np.full(pts.shape[0], float(c))
            for i, e in enumerate(m):
                if e == 1:
                    term *= pts[:, i]
                elif e > 1:
                    term *= pts[:, i] ** e
            acc += term
        return acc


def _integer_parts(p: HomogeneousPolynomial) -> tuple[PackedPoly, int]:
    """Clear denominators: return (integer snapshot, common denominator)."""
    den = 1
    for c in p.terms.values():
        if isinstance(c, Fraction):
            den = den * c.denominator // math.gcd(den, c.denominator)
        elif isinstance(c, float):
            raise ValueError("exact quadrature requires int or Fraction coefficients")
    if den == 1:
        return PackedPoly(p.terms, p.n), 1
    return PackedPoly({m: int(c * den) for m, c in p.terms.items()}, p.n), den
