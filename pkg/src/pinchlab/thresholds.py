"""Closed-form pinching constants and thresholds.

Everything here is elementary arithmetic on the coupling numbers

    r_{n,p,k} = (2p/3) sqrt((n-1) / (k(n+k-2))),      s_{n,p,k} = (n+2k-2) r_{n,p,k},

which bound the centered-curvature coupling of a degree-k field with values
in Lambda^p (Sym^2 couples like p = 2).  The master inequality

    B ||u||^2 + C ||iota_v u||^2 - D ||iota_v iota_v u||^2 <= 0

holds for constrained fields, so positivity of B and B+C forces u = 0; the
thresholds delta_1, delta_2 (and the Sym^2 variants delta'_2) are exactly the
pinching values where B and B+C change sign.

Each threshold is published in two algebraically equal displays; both are
implemented and cross-checked to 1e-12 on every call as a transcription
guard.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

__all__ = [
    "ThresholdBundle",
    "ThresholdReport",
    "MonotonicityReport",
    "constants",
    "coupling_r",
    "coupling_s",
    "delta1",
    "delta2",
    "delta2_sym",
    "delta2_sym_deg2",
    "delta_lambda1",
    "delta_master",
    "delta_sym2",
    "monotonicity_scan",
    "truncate_decimals",
]

_CROSS_TOL = 1e-12


def _crosscheck(a: float, b: float, what: str) -> float:
    if abs(a - b) > _CROSS_TOL * max(1.0, abs(a)):
        raise AssertionError(f"{what}: the two displays disagree ({a!r} vs {b!r})")
    return a


def truncate_decimals(x: float, digits: int) -> float:
    """Truncate (not round) to the given number of decimals."""
    scale = 10 ** digits
    return math.floor(x * scale) / scale


def coupling_r(n: int, p: int, k: int) -> float:
    """r_{n,p,k} = (2p/3) sqrt((n-1)/(k(n+k-2))); zero for p = 0."""
    if p == 0:
        return 0.0
    return (2.0 * p / 3.0) * math.sqrt((n - 1) / (k * (n + k - 2)))


def coupling_s(n: int, p: int, k: int) -> float:
    """s_{n,p,k} = (n+2k-2) r_{n,p,k}."""
    return (n + 2 * k - 2) * coupling_r(n, p, k)


# ---------------------------------------------------------------------------
# the constants B, C, D
# ---------------------------------------------------------------------------


def _B_forms(n: int, k: int, delta: float, p: int) -> float:
    return (
        delta * k * (n + k - 2)
        - (1 + delta) * p / 2.0
        - (2.0 * p / 3.0) * (1 - delta) * math.sqrt(k * (n + k - 2) * (n - 1))
    )


def _C_forms(n: int, k: int, delta: float, p: int) -> float:
    if k == 1:
        return -(n - 2) * (1 + delta) / 2.0
    lead = k * (n + k - 2) * (n + 2 * k - 4) / ((n + k - 3) * (k - 1) * (n + 2 * k - 2))
    return lead * _B_forms(n, k - 1, delta, p - 1) - (n + 2 * k - 4) * (1 + delta) / 2.0


def _C_sym2(n: int, k: int, delta: float) -> float:
    if k == 1:
        return -(n - 2) * (1 + delta)
    lead = k * (n + k - 2) * (n + 2 * k - 4) / ((n + k - 3) * (k - 1) * (n + 2 * k - 2))
    return lead * _B_forms(n, k - 1, delta, 1) - (n + 2 * k - 4) * (1 + delta)


def _D(n: int, k: int, delta: float) -> float:
    if k == 1:
        return 0.0
    lead = (n + 2 * k - 6) * k * (n + k - 2) * (n + 2 * k - 4) / ((n + k - 3) * (k - 1) * (n + 2 * k - 2))
    return lead * (1 + delta) / 2.0


@dataclass
class ThresholdBundle:
    """All constants entering the master inequality at a given (n, k, p, delta)."""

    n: int
    k: int
    p: int
    delta: float
    r: float
    s: float
    B_forms: float
    B_sym2: float
    C_forms: float
    C_sym2: float
    D: float


def constants(n: int, k: int, p: int, delta: float) -> ThresholdBundle:
    """Evaluate B, C, D (forms and Sym^2) plus the couplings r, s.

    The Sym^2 B-constant is the p = 2 form constant.  For k = 1 the C
    constants take their boundary values and D = 0.
    """
    if n < 3 or k < 1 or p < 0 or not (0 < delta <= 1):
        raise ValueError("need n >= 3, k >= 1, p >= 0, delta in (0, 1]")
    # transcription guard: B in raw and factored displays
    # B = kk [ delta (1 - p/(2kk) + r) - (p/(2kk) + r) ],  kk = k(n+k-2)
    r = coupling_r(n, p, k)
    kk = k * (n + k - 2)
    b_raw = _B_forms(n, k, delta, p)
    b_factored = kk * (delta * (1 - p / (2.0 * kk) + r) - (p / (2.0 * kk) + r))
    _crosscheck(b_raw, b_factored, "B^{Lambda^p}")
    return ThresholdBundle(
        n=n, k=k, p=p, delta=delta,
        r=r, s=coupling_s(n, p, k),
        B_forms=b_raw,
        B_sym2=_B_forms(n, k, delta, 2),
        C_forms=_C_forms(n, k, delta, p),
        C_sym2=_C_sym2(n, k, delta),
        D=_D(n, k, delta),
    )


# ---------------------------------------------------------------------------
# thresholds
# ---------------------------------------------------------------------------


def delta1(n: int, k: int, p: int) -> float:
    """Pinching value where B^{Lambda^p}_{n,k} changes sign (B > 0 iff delta > delta1)."""
    if n < 3 or k < 1 or p < 0:
        raise ValueError("need n >= 3, k >= 1, p >= 0")
    a = p / (2.0 * k * (n + k - 2))
    r = coupling_r(n, p, k)
    first = (a + r) / (1 - a + r)
    a2 = p * (n + 2 * k - 2) / (2.0 * k * (n + k - 2))
    s = coupling_s(n, p, k)
    second = (a2 + s) / (n + 2 * k - 2 - a2 + s)
    return _crosscheck(first, second, "delta1")


def delta2(n: int, k: int, p: int) -> float:
    """Pinching value where B + C changes sign for Lambda^p (needs k >= 2, p >= 1)."""
    if k < 2 or p < 1 or n < 3:
        raise ValueError("need n >= 3, k >= 2, p >= 1")
    t1 = (p - 1) / (2.0 * (n + k - 3) * (k - 1))
    r1 = coupling_r(n, p - 1, k - 1)
    t2 = (n + 2 * k - 2) / (2.0 * k * (n + k - 2))
    ratio = (n + 2 * k - 2) / (n + 2 * k - 4)
    a = p / (2.0 * k * (n + k - 2))
    r = coupling_r(n, p, k)
    first = (t1 + r1 + t2 + ratio * (a + r)) / (1 - t1 + r1 - t2 + ratio * (1 - a + r))
    s1 = coupling_s(n, p - 1, k - 1)
    s = coupling_s(n, p, k)
    u1 = (p - 1) * (n + 2 * k - 4) / (2.0 * (n + k - 3) * (k - 1))
    u2 = (n + 2 * k - 2) * (n + 2 * k - 4) / (2.0 * k * (n + k - 2))
    u3 = p * (n + 2 * k - 2) / (2.0 * k * (n + k - 2))
    second = (u1 + s1 + u2 + u3 + s) / (
        (n + 2 * k - 4) - u1 + s1 - u2 + (n + 2 * k - 2) - u3 + s
    )
    return _crosscheck(first, second, "delta2")


def delta2_sym(n: int, k: int) -> float:
    """Sym^2 analogue of delta2 under ||iota_v iota_v u|| <= ||iota_v u||; k >= 4 even."""
    if k < 4 or k % 2 != 0 or n < 3:
        raise ValueError("need n >= 3 and k >= 4 even")
    t1 = 1.0 / (2.0 * (k - 1) * (n + k - 3))
    r1 = coupling_r(n, 1, k - 1)
    t2 = (n + 2 * k - 2) / (k * (n + k - 2))
    ratio = (n + 2 * k - 2) / (n + 2 * k - 4)
    a = 1.0 / (k * (n + k - 2))
    r2 = coupling_r(n, 2, k)
    t3 = (n + 2 * k - 6) / (2.0 * (k - 1) * (n + k - 3))
    first = (t1 + r1 + t2 + ratio * (a + r2) + t3) / (
        1 - t1 + r1 - t2 + ratio * (1 - a + r2) - t3
    )
    s1 = coupling_s(n, 1, k - 1)
    s2 = coupling_s(n, 2, k)
    u1 = (n + 2 * k - 4) * (n + 2 * k - 5) / (2.0 * (k - 1) * (n + k - 3))
    u2 = (n + 2 * k - 2) * (n + 2 * k - 3) / (k * (n + k - 2))
    second = (u1 + s1 + u2 + s2) / (2 * n + 4 * k - 6 - u1 + s1 - u2 + s2)
    return _crosscheck(first, second, "delta2_sym")


def delta2_sym_deg2(n: int, r: int) -> float:
    """Degree-2 Sym^2 threshold for a rank-r projector part, 1 <= r <= n-1."""
    if not (1 <= r <= n - 1):
        raise ValueError("need 1 <= r <= n-1")
    w = (4.0 / 3.0) * math.sqrt(2.0 * n * (n - 1))
    return (w + n / (n - r)) / (2 * n + w - n / (n - r))


def delta_lambda1(n: int) -> float:
    """Threshold ruling out odd invariant vector fields (degree-3 couplings).

    Two branches: for n <= 8 the B + C sign (delta2 at k=3, p=1) binds, for
    n >= 10 the B sign (delta1 at k=3, p=1) binds.  Cross-validated against
    max(delta1, delta2) on every call.
    """
    if n < 3:
        raise ValueError("need n >= 3")
    sq = math.sqrt(3.0 * (n * n - 1))
    if n <= 8:
        closed = ((2.0 / 3.0) * sq + 0.5 * (n + 3)) / (
            3.0 * (n + 1) + (2.0 / 3.0) * sq - 0.5 + 0.5 * (n + 2) * (5 * n + 2) / (n + 4)
        )
    else:
        closed = ((2.0 / 3.0) * sq + 0.5) / (3.0 * (n + 1) + (2.0 / 3.0) * sq - 0.5)
    built = max(delta1(n, 3, 1), delta2(n, 3, 1))
    return _crosscheck(closed, built, "delta_lambda1")


def delta_sym2(n: int) -> float:
    """Threshold ruling out even invariant projectors; equals delta2_sym(n, 4).

    The closed form is cross-validated against the k = 4 Sym^2 constituent
    (delta1 at p = 2 never binds, and the degree-2 branch is dominated:
    see monotonicity_scan / the acceptance checks).
    """
    if n < 3:
        raise ValueError("need n >= 3")
    sqa = math.sqrt(3.0 * (n * n - 1))
    sqb = math.sqrt((n - 1.0) * (n + 2))
    f = 2.0 * (n + 2) * (n + 4) / (3.0 * (n + 1) * (n + 6))
    closed = (n + 5 + (8.0 / 3.0) * sqb + f * (n + 3 + (4.0 / 3.0) * sqa)) / (
        3.0 * (n + 1) + (8.0 / 3.0) * sqb + f * (5 * n + 3 + (4.0 / 3.0) * sqa)
    )
    return _crosscheck(closed, delta2_sym(n, 4), "delta_sym2")


@dataclass
class ThresholdReport:
    """Master threshold at a dimension: value, case label, and binding branch."""

    n: int
    case: str
    delta1: float
    delta2: float
    composite: float
    binding: str

    def __post_init__(self):
        if abs(self.composite - max(self.delta1, self.delta2)) > 1e-15:
            raise ValueError("composite must be max(delta1, delta2)")


def delta_master(n: int) -> tuple[float, str]:
    """The ergodicity pinching threshold delta(n) with its case label.

    Odd n != 7 needs no pinching (threshold 0).  Even n follows the vector
    field or projector branch by n mod 4; the exceptional dimensions 7, 8,
    134 take the maximum over their structure alternatives (at n = 8 the
    odd Lambda^3 branch binds over the even projector branch, at n = 134
    the Lambda^3 bracket binds over the vector field branch).
    """
    if n < 3:
        raise ValueError("need n >= 3")
    if n == 7:
        return max(delta1(7, 3, 2), delta2(7, 3, 2)), "complex-structure (n=7)"
    if n == 8:
        g2 = max(delta1(8, 3, 3), delta2(8, 3, 3))
        proj = delta_sym2(8)
        if g2 >= proj:
            return g2, "3-form structure (n=8)"
        return proj, "even projector (n=8)"
    if n == 134:
        bracket = max(delta1(134, 3, 3), delta2(134, 3, 3))
        vf = delta_lambda1(134)
        if bracket >= vf:
            return bracket, "3-form bracket (n=134)"
        return vf, "odd vector field (n=134)"
    if n % 2 == 1:
        return 0.0, "ergodic unconditionally (odd n != 7)"
    if n == 4 or n % 4 == 2:
        return delta_lambda1(n), "odd vector field"
    return delta_sym2(n), "even projector"


# ---------------------------------------------------------------------------
# monotonicity scans
# ---------------------------------------------------------------------------


@dataclass
class MonotonicityReport:
    """Grid-scan evidence for the growth lemmas; violations are data, not errors."""

    checked: int
    violations: list

    @property
    def ok(self) -> bool:
        return not self.violations


def monotonicity_scan(
    n_range=range(4, 201),
    k_range=range(2, 101),
    p_values=(1, 2, 3),
    sym_n_range=range(7, 201),
    sym_k_range=range(4, 101, 2),
    tol: float = 1e-14,
) -> MonotonicityReport:
    """Scan: delta1, delta2 decreasing in k and increasing in p; delta'2 decreasing in k."""
    violations = []
    checked = 0
    for n in n_range:
        for p in p_values:
            prev1 = prev2 = None
            for k in k_range:
                v1, v2 = delta1(n, k, p), delta2(n, k, p)
                checked += 2
                if prev1 is not None and v1 > prev1 + tol:
                    violations.append(("delta1 not decreasing in k", (n, k, p), v1, prev1))
                if prev2 is not None and v2 > prev2 + tol:
                    violations.append(("delta2 not decreasing in k", (n, k, p), v2, prev2))
                prev1, prev2 = v1, v2
    for n in n_range:
        for k in (min(k_range), max(k_range)):
            for p in p_values[:-1]:
                checked += 2
                if delta1(n, k, p) > delta1(n, k, p + 1) + tol:
                    violations.append(("delta1 not increasing in p", (n, k, p)))
                if delta2(n, k, p) > delta2(n, k, p + 1) + tol:
                    violations.append(("delta2 not increasing in p", (n, k, p)))
    for n in sym_n_range:
        prev = None
        for k in sym_k_range:
            v = delta2_sym(n, k)
            checked += 1
            if prev is not None and v > prev + tol:
                violations.append(("delta2_sym not decreasing in k", (n, k), v, prev))
            prev = v
    return MonotonicityReport(checked=checked, violations=violations)
