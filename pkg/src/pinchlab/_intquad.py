"""Exact sphere quadrature kernel for integer-coefficient polynomials.

The surface measure is the unnormalized one (total mass vol(S^{n-1})) and all
integrals are returned in units of the sphere volume:

    integral of x^m over S^{n-1}  =  [ prod_i (m_i - 1)!! / N_d ] * vol(S^{n-1})

when every exponent m_i is even (0 otherwise), where d = |m| and
N_d = n (n+2) (n+4) ... (n+d-2).  Both factors are integers, so the integral
of an integer-coefficient polynomial of homogeneous degree d is an exact
rational with denominator N_d.

Monomials are packed into single ints, 6 bits per coordinate, which turns
monomial multiplication into integer addition.  The hot path (pairwise
product integrals) runs on int64 numpy arrays when a conservative overflow
bound allows it, with a Python big-int fallback otherwise, so results are
exact in all cases.
"""

from __future__ import annotations

from fractions import Fraction
from functools import lru_cache

import numpy as np

BITS = 6
_MAXEXP = (1 << BITS) - 1


def pack_exponents(m) -> int:
    """Pack an exponent tuple into one int, 6 bits per coordinate."""
    key = 0
    for i, e in enumerate(m):
        if e > _MAXEXP:
            raise OverflowError(f"exponent {e} exceeds the packed-key limit {_MAXEXP}")
        key |= e << (BITS * i)
    return key


def unpack_exponents(key: int, n: int) -> tuple:
    return tuple((key >> (BITS * i)) & _MAXEXP for i in range(n))


def double_factorial_odd(m: int) -> int:
    """(m-1)!! for even m >= 0 (the product of odd numbers below m)."""
    r = 1
    while m > 1:
        r *= m - 1
        m -= 2
    return r


def monomial_exponents(n: int, k: int):
    """All exponent tuples of length n with sum k, in lexicographic order."""
    if n == 1:
        return [(k,)]
    out = []
    for first in range(k, -1, -1):
        for rest in monomial_exponents(n - 1, k - first):
            out.append((first,) + rest)
    return out


@lru_cache(maxsize=None)
def weight_denominator(n: int, d: int) -> int:
    """N_d = n (n+2) ... (n+d-2) for even total degree d."""
    r = 1
    for j in range(0, d, 2):
        r *= n + j
    return r


@lru_cache(maxsize=None)
def _weight_table(n: int, d: int):
    """Sorted packed keys and integer numerators for even-exponent degree-d monomials."""
    keys, vals = [], []
    for m in monomial_exponents(n, d):
        if all(e % 2 == 0 for e in m):
            keys.append(pack_exponents(m))
            w = 1
            for e in m:
                w *= double_factorial_odd(e)
            vals.append(w)
    order = np.argsort(np.array(keys, dtype=np.int64))
    karr = np.array(keys, dtype=np.int64)[order]
    varr = np.array(vals, dtype=np.int64)[order]
    wdict = {int(k): int(v) for k, v in zip(karr, varr)}
    return karr, varr, wdict


def monomial_weight_numerator(m) -> int:
    """prod_i (m_i - 1)!! if all exponents even, else 0."""
    w = 1
    for e in m:
        if e % 2 == 1:
            return 0
        w *= double_factorial_odd(e)
    return w


class PackedPoly:
    """Polynomial snapshot for the quadrature kernel: packed keys + int coefficients.

    Coefficients must be integral; callers clear denominators beforehand.
    """

    __slots__ = ("n", "deg", "keys", "coeffs", "coeffs_list", "maxabs")

    def __init__(self, terms: dict, n: int):
        self.n = n
        deg = 0
        maxabs = 0
        keys, coeffs = [], []
        for m, c in sorted(terms.items()):
            ci = int(c)
            if ci != c:
                raise ValueError("PackedPoly requires integer coefficients")
            if ci == 0:
                continue
            keys.append(pack_exponents(m))
            coeffs.append(ci)
            deg = sum(m)
            maxabs = max(maxabs, abs(ci))
        self.deg = deg
        self.maxabs = maxabs
        self.keys = np.array(keys, dtype=np.int64)
        self.coeffs_list = coeffs
        self.coeffs = np.array(coeffs, dtype=np.int64) if maxabs < 2 ** 62 else None

    def __len__(self):
        return len(self.keys)


def pair_integral(P: PackedPoly, Q: PackedPoly, shift_key: int = 0, shift_deg: int = 0) -> Fraction:
    """Exact integral of P * Q * x^shift over the sphere, in units of vol(S^{n-1})."""
    if len(P) == 0 or len(Q) == 0:
        return Fraction(0)
    n = P.n
    d = P.deg + Q.deg + shift_deg
    if d % 2 == 1:
        return Fraction(0)
    tkeys, tvals, wdict = _weight_table(n, d)
    N = weight_denominator(n, d)
    # int64 fast path: bound every partial sum by count * max|c_p c_q w|
    if (
        P.coeffs is not None
        and Q.coeffs is not None
        and P.maxabs * Q.maxabs * int(tvals.max()) * (len(P) * len(Q)) < 2 ** 62
    ):
        K = (P.keys[:, None] + Q.keys[None, :] + shift_key).ravel()
        idx = np.searchsorted(tkeys, K)
        idx[idx >= len(tkeys)] = 0
        valid = tkeys[idx] == K
        if not valid.any():
            return Fraction(0)
        C = (P.coeffs[:, None] * Q.coeffs[None, :]).ravel()[valid]
        W = tvals[idx[valid]]
        return Fraction(int((C * W).sum()), N)
    # exact big-int fallback
    total = 0
    qk_list = Q.keys.tolist()
    for kp, cp in zip(P.keys.tolist(), P.coeffs_list):
        base = kp + shift_key
        for kq, cq in zip(qk_list, Q.coeffs_list):
            w = wdict.get(base + kq)
            if w:
                total += cp * cq * w
    return Fraction(total, N)


def poly_integral(terms: dict, n: int) -> Fraction:
    """Exact integral of a (possibly mixed-degree) polynomial dict, in units of vol."""
    total = Fraction(0)
    for m, c in terms.items():
        num = monomial_weight_numerator(m)
        if num:
            total += Fraction(c) * Fraction(num, weight_denominator(n, sum(m)))
    return total
