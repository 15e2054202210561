"""Polynomial spherical harmonics on S^{n-1} and bundle-valued harmonic fields.

Spherical harmonics of degree k are realized as harmonic homogeneous
polynomials of degree k; the space has dimension

    dim = C(n+k-1, k) - C(n+k-3, k-2).

The basis is computed as the exact nullspace of the symbolic Laplacian on
degree-k monomials and then orthogonalized with respect to the L^2(S^{n-1})
pairing.  The Laplacian preserves the parity class of an exponent vector
(its reductions mod 2), and monomial sphere integrals vanish across distinct
parity classes, so both steps run block-by-block over parity classes; this
keeps exact arithmetic fast and makes cross-block orthogonality automatic.

A HarmonicField is an element of Omega_k tensor E for E in {scalar, Lambda^p,
Sym^2}: one degree-k harmonic polynomial per E-basis index.  The tautological
contraction iota_v, its harmonic degree report, and the constrained ("normal")
subspaces where iota_v drops degree are all computed exactly.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from ._intquad import PackedPoly, pair_integral
from ._linalg import blocked_nullspace, integerize, rref_nullspace
from ._modes import DOUBLE, DOUBLE_RTOL, current_mode
from .polynomials import (
    HomogeneousPolynomial,
    monomial_exponents,
    monomial_sphere_integral,
    sphere_volume,
)

__all__ = [
    "Bundle",
    "HarmonicField",
    "QuadratureResult",
    "TautologicalContraction",
    "ZeroSubspaceError",
    "contract_tautological",
    "dim_harmonics",
    "harmonic_basis",
    "harmonic_decompose",
    "inner_product",
    "inner_product_mc",
    "normal_subspace_basis",
    "normal_subspace_sample",
    "vertical_gradient",
    "vertical_laplacian_eigencheck",
]


class ZeroSubspaceError(ValueError):
    """The requested constrained subspace contains only the zero field."""


# ---------------------------------------------------------------------------
# scalar harmonics
# ---------------------------------------------------------------------------


def dim_harmonics(n: int, k: int) -> int:
    """Dimension of the degree-k spherical harmonics on S^{n-1}."""
    if n < 2 or k < 0:
        raise ValueError("need n >= 2 and k >= 0")
    if k == 0:
        return 1
    if k == 1:
        return n
    return math.comb(n + k - 1, k) - math.comb(n + k - 3, k - 2)


_BASIS_CACHE: dict = {}


def harmonic_basis(n: int, k: int) -> list[HomogeneousPolynomial]:
    """Orthogonal basis of degree-k harmonics, with primitive integer coefficients.

    Deterministic: parity blocks in sorted order, monomials lexicographic.
    The per-(n, k) result is cached; population is idempotent, so concurrent
    first calls may duplicate work but never expose a torn list.
    """
    key = (n, k)
    cached = _BASIS_CACHE.get(key)
    if cached is not None:
        return list(cached)
    basis = _build_basis(n, k)
    if len(basis) != dim_harmonics(n, k):
        raise AssertionError(f"basis size {len(basis)} != expected {dim_harmonics(n, k)}")
    _BASIS_CACHE[key] = tuple(basis)
    return list(basis)


def _build_basis(n: int, k: int) -> list[HomogeneousPolynomial]:
    blocks: dict[tuple, list[tuple]] = {}
    for m in monomial_exponents(n, k):
        blocks.setdefault(tuple(e % 2 for e in m), []).append(m)
    basis: list[HomogeneousPolynomial] = []
    for par in sorted(blocks):
        monos = blocks[par]
        cols = {m: j for j, m in enumerate(monos)}
        row_map: dict[tuple, int] = {}
        entries = []
        for j, m in enumerate(monos):
            for i, e in enumerate(m):
                if e >= 2:
                    mm = list(m)
                    mm[i] -= 2
                    ridx = row_map.setdefault(tuple(mm), len(row_map))
                    entries.append((ridx, j, e * (e - 1)))
        if row_map:
            dense = [[Fraction(0)] * len(monos) for _ in range(len(row_map))]
            for ridx, j, v in entries:
                dense[ridx][j] += v
            null = rref_nullspace(dense, len(monos))
        else:
            null = [[1 if jj == j else 0 for jj in range(len(monos))] for j in range(len(monos))]
        # Gram-Schmidt within the block (cross-block orthogonality is automatic)
        ortho: list[tuple[HomogeneousPolynomial, Fraction]] = []
        for vec in null:
            p = HomogeneousPolynomial(n, k, {monos[j]: vec[j] for j in range(len(monos))})
            for q, qn in ortho:
                pr = p.sphere_inner(q) / qn
                if pr:
                    p = p - q.scale(pr)
            p = _primitive(p)
            ortho.append((p, p.sphere_inner(p)))
        basis.extend(p for p, _ in ortho)
    return basis


def _primitive(p: HomogeneousPolynomial) -> HomogeneousPolynomial:
    """Rescale to primitive integer coefficients (content 1)."""
    if p.is_zero():
        return p
    den = 1
    for c in p.terms.values():
        d = c.denominator if isinstance(c, Fraction) else 1
        den = den * d // math.gcd(den, d)
    ints = {m: int(c * den) for m, c in p.terms.items()}
    g = 0
    for c in ints.values():
        g = math.gcd(g, abs(c))
    if g > 1:
        ints = {m: c // g for m, c in ints.items()}
    return HomogeneousPolynomial(p.n, p.degree, ints)


def harmonic_decompose(u: HomogeneousPolynomial) -> list[HomogeneousPolynomial]:
    """Decompose u = sum_j |x|^{2j} h_{k-2j} with each h harmonic; returns [h_k, h_{k-2}, ...].

    Uses the exact recursion Delta(|x|^{2j} h_m) = 2j(2m+n+2j-2) |x|^{2j-2} h_m:
    decomposing Delta(u) determines every lower part, and h_k is the remainder.
    The result list always has floor(k/2)+1 entries (zero polynomials included).
    """
    n, k = u.n, u.degree
    parts = _decompose_dict(u)
    return [parts.get(k - 2 * j, HomogeneousPolynomial.zero(n, k - 2 * j)) for j in range(k // 2 + 1)]


def _decompose_dict(u: HomogeneousPolynomial) -> dict[int, HomogeneousPolynomial]:
    n, d = u.n, u.degree
    if u.is_zero():
        return {}
    if d <= 1:
        return {d: u}
    rec = _decompose_dict(u.laplacian())
    rsq = HomogeneousPolynomial.radius_squared(n)
    parts: dict[int, HomogeneousPolynomial] = {}
    acc = u
    for j in range(1, d // 2 + 1):
        deg = d - 2 * j
        if deg in rec and not rec[deg].is_zero():
            coef = 2 * j * (2 * (d - 2 * j) + n + 2 * j - 2)
            h = rec[deg].scale(Fraction(1, coef))
            parts[deg] = h
            t = h
            for _ in range(j):
                t = t * rsq
            acc = acc - t
    if not acc.is_zero():
        parts[d] = acc
    return parts


# ---------------------------------------------------------------------------
# bundle-valued fields
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class Bundle:
    """Coefficient bundle of a harmonic field: scalar, Lambda^p, or Sym^2."""

    kind: str
    p: int = 0

    @classmethod
    def scalar(cls) -> "Bundle":
        return cls("scalar")

    @classmethod
    def form(cls, p: int) -> "Bundle":
        if p < 0:
            raise ValueError("form degree must be >= 0")
        return cls("form", p)

    @classmethod
    def sym2(cls) -> "Bundle":
        return cls("sym2")

    def component_keys(self, n: int) -> list[tuple]:
        if self.kind == "scalar":
            return [()]
        if self.kind == "form":
            return list(itertools.combinations(range(n), self.p))
        if self.kind == "sym2":
            return [(i, j) for i in range(n) for j in range(i, n)]
        raise ValueError(f"unknown bundle kind {self.kind!r}")

    def multiplicity(self, key: tuple) -> int:
        """Weight of a stored component in the bundle inner product."""
        if self.kind == "sym2" and key[0] != key[1]:
            return 2
        return 1


class HarmonicField:
    """An element of Omega_k tensor E: one degree-k harmonic polynomial per E-index."""

    __slots__ = ("n", "k", "bundle", "components")

    def __init__(self, n: int, k: int, bundle: Bundle, components: dict, validate: bool = True):
        self.n = n
        self.k = k
        self.bundle = bundle
        self.components = {}
        valid_keys = set(bundle.component_keys(n))
        for key, poly in components.items():
            key = tuple(key)
            if key not in valid_keys:
                raise ValueError(f"component key {key} invalid for bundle {bundle}")
            if poly.is_zero():
                continue
            if poly.degree != k or poly.n != n:
                raise ValueError("component polynomial has wrong degree or dimension")
            self.components[key] = poly
        if validate:
            for key, poly in self.components.items():
                lap = poly.laplacian()
                if not lap.is_zero():
                    if any(isinstance(c, float) for c in poly.terms.values()):
                        scale = max(abs(c) for c in poly.terms.values())
                        if max(abs(c) for c in lap.terms.values()) <= 1e-9 * max(scale, 1.0):
                            continue
                    raise ValueError(f"component {key} is not harmonic")

    def is_zero(self) -> bool:
        return not self.components

    def component(self, key) -> HomogeneousPolynomial:
        return self.components.get(tuple(key), HomogeneousPolynomial.zero(self.n, self.k))

    def scale(self, s) -> "HarmonicField":
        return HarmonicField(
            self.n, self.k, self.bundle,
            {key: p.scale(s) for key, p in self.components.items()}, validate=False,
        )

    def __add__(self, other: "HarmonicField") -> "HarmonicField":
        if (self.n, self.k, self.bundle) != (other.n, other.k, other.bundle):
            raise ValueError("field mismatch")
        comps = dict(self.components)
        for key, p in other.components.items():
            comps[key] = comps.get(key, HomogeneousPolynomial.zero(self.n, self.k)) + p
        return HarmonicField(self.n, self.k, self.bundle, comps, validate=False)

    def __repr__(self):
        return (f"HarmonicField(n={self.n}, k={self.k}, bundle={self.bundle.kind}"
                f"{self.bundle.p if self.bundle.kind == 'form' else ''}, "
                f"{len(self.components)} nonzero components)")


@dataclass
class QuadratureResult:
    """Value of a sphere integral together with its accuracy contract."""

    value: float
    error_estimate: float
    method: str  # "exact-monomial" | "monte-carlo"

    def __post_init__(self):
        if self.method == "exact-monomial" and self.error_estimate != 0:
            raise ValueError("exact-monomial results carry zero error estimate")


def inner_product(u: HarmonicField, w: HarmonicField, mode: str | None = None):
    """L^2(S^{n-1}) pairing of two fields, with the bundle pairing on indices.

    Exact mode returns a Fraction in units of vol(S^{n-1}); double mode a float
    in the same units.
    """
    if (u.n, u.bundle) != (w.n, w.bundle):
        raise ValueError("fields must share dimension and bundle")
    if current_mode(mode) == DOUBLE:
        total = 0.0
        for key, p in u.components.items():
            q = w.components.get(key)
            if q is not None:
                total += u.bundle.multiplicity(key) * float(p.sphere_inner(q))
        return total
    total = Fraction(0)
    for key, p in u.components.items():
        q = w.components.get(key)
        if q is not None:
            total += u.bundle.multiplicity(key) * p.sphere_inner(q)
    return total


def norm_squared(u: HarmonicField):
    return inner_product(u, u)


def inner_product_mc(u: HarmonicField, w: HarmonicField, mc_samples: int, seed: int) -> QuadratureResult:
    """Monte-Carlo estimate of the field pairing (oracle for the exact path).

    Samples uniform sphere points via normalized Gaussians; the value is in
    absolute units (vol included), matching float(inner_product) * vol.
    """
    if (u.n, u.bundle) != (w.n, w.bundle):
        raise ValueError("fields must share dimension and bundle")
    rng = np.random.default_rng(seed)
    pts = rng.standard_normal((mc_samples, u.n))
    pts /= np.linalg.norm(pts, axis=1, keepdims=True)
    vals = np.zeros(mc_samples)
    for key, p in u.components.items():
        q = w.components.get(key)
        if q is not None:
            vals += u.bundle.multiplicity(key) * p.evaluate(pts) * q.evaluate(pts)
    vol = sphere_volume(u.n)
    mean = float(vals.mean())
    stderr = float(vals.std(ddof=1)) / math.sqrt(mc_samples) if mc_samples > 1 else 0.0
    return QuadratureResult(value=vol * mean, error_estimate=vol * stderr, method="monte-carlo")


# ---------------------------------------------------------------------------
# vertical calculus
# ---------------------------------------------------------------------------


def vertical_gradient(u: HarmonicField) -> dict:
    """Per component, the tangential (vertical) gradient as degree-(k+1) polynomials.

    Entry i is |x|^2 d_i u - k x_i u, which restricts on the sphere to
    d_i u - k v_i u, the i-th component of the gradient of u|_S.
    """
    n, k = u.n, u.k
    rsq = HomogeneousPolynomial.radius_squared(n)
    out = {}
    for key, p in u.components.items():
        out[key] = [rsq * p.diff(i) - p.times_coord(i).scale(k) for i in range(n)]
    return out


def vertical_laplacian_eigencheck(u: HarmonicField, mode: str | None = None) -> bool:
    """Exact check of int |grad_V u|^2 = k(n+k-2) ||u||^2 over the sphere."""
    n, k = u.n, u.k
    lhs = Fraction(0)
    for key, p in u.components.items():
        mult = u.bundle.multiplicity(key)
        for i in range(n):
            di = p.diff(i)
            xiu = p.times_coord(i)
            term = di.sphere_inner(di) - 2 * k * di.sphere_inner(xiu) + k * k * xiu.sphere_inner(xiu)
            lhs += mult * term
    rhs = k * (n + k - 2) * inner_product(u, u)
    if current_mode(mode) == DOUBLE:
        scale = max(abs(float(lhs)), abs(float(rhs)), 1.0)
        return abs(float(lhs) - float(rhs)) <= DOUBLE_RTOL * scale
    return lhs == rhs


# ---------------------------------------------------------------------------
# tautological contraction and normal subspaces
# ---------------------------------------------------------------------------


@dataclass
class TautologicalContraction:
    """iota_v u: polynomial components of degree k+1 plus their harmonic degrees."""

    n: int
    degree: int                       # homogeneous degree of the components (k+1)
    components: dict                  # key -> HomogeneousPolynomial
    degree_report: list               # harmonic degrees present on the sphere
    second: HomogeneousPolynomial | None = None       # iota_v iota_v u (sym2 only)
    second_report: list = field(default_factory=list)

    def top_degree(self) -> int | None:
        return max(self.degree_report) if self.degree_report else None


def _iota_components(u: HarmonicField) -> dict:
    """Raw iota_v components: (p-1)-subsets for forms, single indices for sym2."""
    n = u.n
    out: dict = {}
    if u.bundle.kind == "form":
        for alpha, p in u.components.items():
            for t, i in enumerate(alpha):
                rest = alpha[:t] + alpha[t + 1:]
                term = p.times_coord(i).scale((-1) ** t)
                out[rest] = out.get(rest, HomogeneousPolynomial.zero(n, u.k + 1)) + term
    elif u.bundle.kind == "sym2":
        for (i, j), p in u.components.items():
            out[(j,)] = out.get((j,), HomogeneousPolynomial.zero(n, u.k + 1)) + p.times_coord(i)
            if i != j:
                out[(i,)] = out.get((i,), HomogeneousPolynomial.zero(n, u.k + 1)) + p.times_coord(j)
    else:
        raise ValueError("tautological contraction needs a form or sym2 bundle")
    return {key: p for key, p in out.items() if not p.is_zero()}


def contract_tautological(u: HarmonicField) -> TautologicalContraction:
    """Contract with the base point: forms lose one slot, sym2 fields become vectors.

    The degree report lists the harmonic degrees (of matching parity, at most
    k+1) present in the components restricted to the sphere; for sym2 fields
    the second contraction iota_v iota_v u and its report are included too.
    """
    if u.bundle.kind == "scalar":
        raise ValueError("cannot contract a scalar-bundle field")
    if u.bundle.kind == "form" and u.bundle.p < 1:
        raise ValueError("form degree must be >= 1 to contract")
    comps = _iota_components(u)
    degs: set[int] = set()
    for p in comps.values():
        for j, h in enumerate(harmonic_decompose(p)):
            if not h.is_zero():
                degs.add(p.degree - 2 * j)
    second = None
    second_report: list = []
    if u.bundle.kind == "sym2":
        second = HomogeneousPolynomial.zero(u.n, u.k + 2)
        for (j,), p in comps.items():
            second = second + p.times_coord(j)
        if not second.is_zero():
            for jj, h in enumerate(harmonic_decompose(second)):
                if not h.is_zero():
                    second_report.append(second.degree - 2 * jj)
    return TautologicalContraction(
        n=u.n, degree=u.k + 1, components=comps,
        degree_report=sorted(degs), second=second, second_report=sorted(second_report),
    )


_SUBSPACE_CACHE: dict = {}


def normal_subspace_basis(n: int, k: int, bundle: Bundle):
    """Integer basis of the subspace of Omega_k tensor E where iota_v drops degree.

    Constraint: the top harmonic part (degree k+1) of every component of
    iota_v u vanishes, and for sym2 additionally the degree-k part of
    iota_v iota_v u vanishes (its degree-(k+2) part is then automatic).
    Returns (scalar harmonic basis, column index [(component key, basis idx)],
    integer basis vectors).
    """
    if k < 1:
        raise ValueError("need k >= 1")
    if bundle.kind not in ("form", "sym2") or (bundle.kind == "form" and bundle.p < 1):
        raise ValueError("normal subspaces exist for Form(p>=1) and Sym2 bundles")
    cache_key = (n, k, bundle)
    cached = _SUBSPACE_CACHE.get(cache_key)
    if cached is not None:
        return cached
    hb = harmonic_basis(n, k)
    keys = Bundle.component_keys(bundle, n)
    columns = []
    col_index = []
    for key in keys:
        for m, h in enumerate(hb):
            probe = HarmonicField(n, k, bundle, {key: h}, validate=False)
            iota = _iota_components(probe)
            sparse: dict = {}
            for ckey, poly in iota.items():
                top = _decompose_dict(poly).get(poly.degree)
                if top is not None:
                    for mono, c in top.terms.items():
                        rk = ("c", ckey, mono)
                        sparse[rk] = sparse.get(rk, Fraction(0)) + Fraction(c)
            if bundle.kind == "sym2":
                second = HomogeneousPolynomial.zero(n, k + 2)
                for (j,), poly in iota.items():
                    second = second + poly.times_coord(j)
                dec = _decompose_dict(second)
                for deg in (k + 2, k):
                    part = dec.get(deg)
                    if part is not None:
                        for mono, c in part.terms.items():
                            rk = ("s", deg, mono)
                            sparse[rk] = sparse.get(rk, Fraction(0)) + Fraction(c)
            columns.append({rk: v for rk, v in sparse.items() if v})
            col_index.append((key, m))
    basis = blocked_nullspace(columns)
    result = (hb, col_index, basis)
    _SUBSPACE_CACHE[cache_key] = result
    return result


def normal_subspace_sample(n: int, k: int, bundle: Bundle, seed: int) -> HarmonicField:
    """Seeded random element of the constrained subspace, with integer coefficients.

    Coefficients along the integer subspace basis are drawn as scaled rounded
    Gaussians, so the draw is deterministic per seed and the resulting field
    is exact.  Raises ZeroSubspaceError when the constraints only admit 0.
    """
    hb, col_index, basis = normal_subspace_basis(n, k, bundle)
    if not basis:
        raise ZeroSubspaceError(f"constrained subspace is zero for (n={n}, k={k}, {bundle.kind})")
    rng = np.random.default_rng(seed)
    coeff = [0] * len(col_index)
    while True:
        lams = [round(16 * g) for g in rng.standard_normal(len(basis))]
        if any(lams):
            break
    for lam, vec in zip(lams, basis):
        if lam:
            for i, x in enumerate(vec):
                if x:
                    coeff[i] += lam * x
    g = 0
    for c in coeff:
        g = math.gcd(g, abs(c))
    if g > 1:
        coeff = [c // g for c in coeff]
    comps: dict = {}
    zero = HomogeneousPolynomial.zero(n, k)
    for (key, m), c in zip(col_index, coeff):
        if c:
            comps[key] = comps.get(key, zero) + hb[m].scale(c)
    return HarmonicField(n, k, bundle, comps, validate=False)
