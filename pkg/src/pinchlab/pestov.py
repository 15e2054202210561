"""Fiberwise energy identities for bundle-valued spherical harmonics.

For a degree-k field u with values in E, pairing the constant-curvature
coupling term against the vertical gradient gives, whenever iota_v u has
harmonic degree <= k-1, the exact identities

    E = Lambda^p:  <G-term u, grad_V u> = (n+2k-4) ||iota_v u||^2 + p ||u||^2,
    E = Sym^2:     <G-term u, grad_V u> = 2(n+2k-4) ||iota_v u||^2 + 2 ||u||^2,

where all norms are L^2 on the sphere fiber.  Both sides are polynomial
integrals and are verified in exact rational arithmetic; dropping the degree
constraint breaks the identity, which the checks expose rather than hide.

The remaining pieces verified here: the vertical Laplacian energy identity
int sum_i <grad_V u_alpha, e_i>^2 = k(n+k-2) ||u||^2 (no constraint needed),
the Cauchy-Schwarz chain bounding the curvature coupling by
sqrt((n-1) k(n+k-2)) ||u||^2 (Monte-Carlo, since the integrand carries
absolute values), a slot-exchange relation for symmetric tensors constrained
by K(v,...,v,v,.) = 0, and the rank-one projector fixture built from a block
complex structure.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from ._intquad import PackedPoly, pair_integral
from ._linalg import blocked_nullspace
from .harmonics import (
    Bundle,
    HarmonicField,
    ZeroSubspaceError,
    _iota_components,
    contract_tautological,
    harmonic_basis,
    inner_product,
)
from .polynomials import HomogeneousPolynomial, monomial_exponents, sphere_volume

__all__ = [
    "ChainResult",
    "ConstraintViolationError",
    "GTermReport",
    "cauchy_schwarz_chain",
    "g_term_forms",
    "g_term_sym2",
    "gradient_norm_identity",
    "projector_relation_check",
    "rank1_fixture",
    "tautological_vector_field",
]


class ConstraintViolationError(ValueError):
    """The field does not satisfy the iota_v degree-drop constraint."""

    def __init__(self, top_degree: int, allowed: int):
        self.top_degree = top_degree
        self.allowed = allowed
        super().__init__(f"iota_v u has top harmonic degree {top_degree} > {allowed}")


@dataclass
class GTermReport:
    """Exact two-sided evaluation of a G-term identity."""

    lhs: Fraction
    rhs: Fraction
    match: bool

    def __post_init__(self):
        if self.match != (self.lhs == self.rhs):
            raise ValueError("match flag inconsistent with lhs/rhs")


def _integer_components(u: HarmonicField) -> tuple[dict, int]:
    """Clear denominators across all components: returns ({key: int poly}, scale)."""
    den = 1
    for p in u.components.values():
        for c in p.terms.values():
            if isinstance(c, Fraction):
                den = den * c.denominator // math.gcd(den, c.denominator)
            elif isinstance(c, float):
                raise ValueError("exact identities need int or Fraction coefficients")
    if den == 1:
        return dict(u.components), 1
    comps = {
        key: HomogeneousPolynomial(u.n, u.k, {m: int(c * den) for m, c in p.terms.items()})
        for key, p in u.components.items()
    }
    return comps, den


def _check_constraint(u: HarmonicField, enforce: bool) -> None:
    if not enforce or u.is_zero():
        return
    rep = contract_tautological(u)
    top = rep.top_degree()
    if top is not None and top > u.k - 1:
        raise ConstraintViolationError(top, u.k - 1)
    if u.bundle.kind == "sym2" and rep.second_report:
        top2 = max(rep.second_report)
        if top2 > u.k - 2:
            raise ConstraintViolationError(top2, u.k - 2)


def _norms_for_rhs(comps: dict, u: HarmonicField) -> tuple[Fraction, Fraction]:
    """(||iota_v u||^2, ||u||^2) of the integer-scaled field, exactly."""
    n, k = u.n, u.k
    work = HarmonicField(n, k, u.bundle, comps, validate=False)
    iota = _iota_components(work)
    norm_iota = Fraction(0)
    for poly in iota.values():
        pp = PackedPoly(poly.terms, n)
        norm_iota += pair_integral(pp, pp)
    norm_u = Fraction(0)
    for key, poly in comps.items():
        pp = PackedPoly(poly.terms, n)
        norm_u += u.bundle.multiplicity(key) * pair_integral(pp, pp)
    return norm_iota, norm_u


def g_term_forms(u: HarmonicField, enforce_constraint: bool = True) -> GTermReport:
    """Exact check of <G-term u, grad_V u> = (n+2k-4)||iota_v u||^2 + p||u||^2.

    The left side is the quadrature of sum_{alpha,beta} u_alpha
    <G^{Lambda^p}(v, grad_V u_beta) e_alpha, e_beta>; with
    G(v,b)c = <v,c>b - <b,c>v extended as a derivation, only basis wedges
    differing in one index contribute, and the -k v v parts of grad_V cancel
    pairwise, so the integrand reduces to first-derivative couplings.
    """
    if u.bundle.kind != "form" or u.bundle.p < 1:
        raise ValueError("g_term_forms needs a Form(p >= 1) field")
    _check_constraint(u, enforce_constraint)
    n, k, p = u.n, u.k, u.bundle.p
    comps, scale = _integer_components(u)
    packed = {key: PackedPoly(poly.terms, n) for key, poly in comps.items()}
    derivs = {key: [PackedPoly(poly.diff(i).terms, n) for i in range(n)] for key, poly in comps.items()}
    lhs = Fraction(0)
    from itertools import combinations

    for S in combinations(range(n), p - 1):
        rest = [i for i in range(n) if i not in S]
        for a in rest:
            alpha = tuple(sorted(S + (a,)))
            if alpha not in packed:
                continue
            pos_a = alpha.index(a)
            key_a = 1 << (6 * a)
            for j in rest:
                if j == a:
                    continue
                beta = tuple(sorted(S + (j,)))
                if beta not in packed:
                    continue
                pos_j = beta.index(j)
                sigma = (-1) ** (pos_a + pos_j)
                key_j = 1 << (6 * j)
                t1 = pair_integral(packed[alpha], derivs[beta][j], key_a, 1)
                t2 = pair_integral(packed[alpha], derivs[beta][a], key_j, 1)
                lhs += sigma * (t1 - t2)
    norm_iota, norm_u = _norms_for_rhs(comps, u)
    rhs = (n + 2 * k - 4) * norm_iota + p * norm_u
    s2 = scale * scale
    lhs, rhs = lhs / s2, rhs / s2
    return GTermReport(lhs=lhs, rhs=rhs, match=lhs == rhs)


def g_term_sym2(u: HarmonicField, enforce_constraint: bool = True) -> GTermReport:
    """Exact check of <G-term u, grad_V u> = 2(n+2k-4)||iota_v u||^2 + 2||u||^2.

    The left side is 2 sum_{i,j,l} int u_ij <G(v, grad_V u_il) e_j, e_l>; as in
    the form case the -k v v parts cancel inside each (j, l) pair.
    """
    if u.bundle.kind != "sym2":
        raise ValueError("g_term_sym2 needs a Sym2 field")
    _check_constraint(u, enforce_constraint)
    n, k = u.n, u.k
    comps, scale = _integer_components(u)

    def comp(i, j):
        return comps.get((min(i, j), max(i, j)))

    packed: dict = {}
    derivs: dict = {}
    for key, poly in comps.items():
        packed[key] = PackedPoly(poly.terms, n)
        derivs[key] = [PackedPoly(poly.diff(i).terms, n) for i in range(n)]
    lhs = Fraction(0)
    for i in range(n):
        for j in range(n):
            pij = comps.get((min(i, j), max(i, j)))
            if pij is None:
                continue
            Pij = packed[(min(i, j), max(i, j))]
            key_j = 1 << (6 * j)
            for l in range(n):
                if l == j:
                    continue
                kil = (min(i, l), max(i, l))
                if kil not in derivs:
                    continue
                key_l = 1 << (6 * l)
                t1 = pair_integral(Pij, derivs[kil][l], key_j, 1)
                t2 = pair_integral(Pij, derivs[kil][j], key_l, 1)
                lhs += t1 - t2
    lhs *= 2
    norm_iota, norm_u = _norms_for_rhs(comps, u)
    rhs = 2 * (n + 2 * k - 4) * norm_iota + 2 * norm_u
    s2 = scale * scale
    lhs, rhs = lhs / s2, rhs / s2
    return GTermReport(lhs=lhs, rhs=rhs, match=lhs == rhs)


def gradient_norm_identity(u: HarmonicField) -> bool:
    """Exact check of int sum_{alpha,i} <grad_V u_alpha, e_i>^2 = k(n+k-2) ||u||^2."""
    n, k = u.n, u.k
    comps, _ = _integer_components(u)
    lhs = Fraction(0)
    for key, poly in comps.items():
        mult = u.bundle.multiplicity(key)
        pp = PackedPoly(poly.terms, n)
        for i in range(n):
            di = PackedPoly(poly.diff(i).terms, n)
            key_i = 1 << (6 * i)
            term = (
                pair_integral(di, di)
                - 2 * k * pair_integral(di, pp, key_i, 1)
                + k * k * pair_integral(pp, pp, 2 * key_i, 2)
            )
            lhs += mult * term
    comps_field = HarmonicField(n, k, u.bundle, comps, validate=False)
    rhs = k * (n + k - 2) * inner_product(comps_field, comps_field)
    return lhs == rhs


@dataclass
class ChainResult:
    """Monte-Carlo evaluation of the Cauchy-Schwarz chain against its bound."""

    lhs: float
    bound: float
    stderr: float

    def within_bound(self, sigmas: float = 3.0) -> bool:
        return self.lhs <= self.bound + sigmas * self.stderr


def cauchy_schwarz_chain(u: HarmonicField, mc_samples: int = 100000, seed: int = 0,
                         max_rel_stderr: float = 0.05) -> ChainResult:
    """Estimate sum_i int |e_i - v_i v| |u| |sum_alpha <grad_V u_alpha, e_i> e_alpha|.

    The integrand carries absolute values, so this is Monte-Carlo with a
    reported standard error; the contract is lhs <= bound within noise, where
    bound = sqrt((n-1) k(n+k-2)) ||u||^2.  Raises if the requested relative
    accuracy is not reached at the sample cap.
    """
    n, k = u.n, u.k
    if u.is_zero():
        return ChainResult(lhs=0.0, bound=0.0, stderr=0.0)
    rng = np.random.default_rng(seed)
    pts = rng.standard_normal((mc_samples, n))
    pts /= np.linalg.norm(pts, axis=1, keepdims=True)
    keys = sorted(u.components)
    vals = np.stack([u.components[key].evaluate(pts) for key in keys])       # (K, m)
    mults = np.array([u.bundle.multiplicity(key) for key in keys])[:, None]
    normsq = (mults * vals ** 2).sum(0)                                       # (m,)
    # gradient components <grad_V u_alpha, e_i> = d_i u_alpha - k v_i u_alpha
    g = np.zeros((len(keys), n, mc_samples))
    for t, key in enumerate(keys):
        poly = u.components[key]
        for i in range(n):
            di = poly.diff(i)
            g[t, i] = (di.evaluate(pts) if not di.is_zero() else 0.0) - k * pts[:, i] * vals[t]
    gnorm_i = np.sqrt((mults[:, :, None] * g ** 2).sum(0))                    # (n, m)
    f_i = np.sqrt(np.maximum(1.0 - pts.T ** 2, 0.0)) * np.sqrt(normsq)[None, :]
    integrand = (f_i * gnorm_i).sum(0)
    vol = sphere_volume(n)
    lhs = vol * float(integrand.mean())
    stderr = vol * float(integrand.std(ddof=1)) / math.sqrt(mc_samples)
    norm_u = float(inner_product(u, u)) * vol
    bound = math.sqrt((n - 1) * k * (n + k - 2)) * norm_u
    if lhs > 0 and stderr / lhs > max_rel_stderr:
        raise RuntimeError(f"Monte-Carlo failed to converge: rel stderr {stderr / lhs:.3e}")
    return ChainResult(lhs=lhs, bound=bound, stderr=stderr)


def tautological_vector_field(n: int) -> HarmonicField:
    """u(v) = v as a degree-1 Form(1) field; attains equality in the chain."""
    comps = {(i,): HomogeneousPolynomial.coordinate(n, i) for i in range(n)}
    return HarmonicField(n, 1, Bundle.form(1), comps)


# ---------------------------------------------------------------------------
# slot-exchange relation for constrained symmetric tensors
# ---------------------------------------------------------------------------


def projector_relation_check(n: int, k: int, seed: int = 0, samples: int = 3,
                             pairs: int = 100) -> bool:
    """Verify K(v,..,v,w,w) = (k(k-1)/2) K(w,w,v,..,v,v,v) on constrained tensors.

    K lives in Sym^k(R^n) tensor Sym^2(R^n), sampled exactly from the
    nullspace of the linear constraint K(v,...,v,v,.) = 0 (a polynomial
    identity in v).  The relation is checked at seeded integer pairs with
    w orthogonal to v; both sides are homogeneous, so no normalization is
    needed.  Raises ZeroSubspaceError when the constraint forces K = 0.
    """
    if k < 2 or k % 2 != 0:
        raise ValueError("need k >= 2 even")
    monos = monomial_exponents(n, k)
    pairs_idx = [(i, j) for i in range(n) for j in range(i, n)]
    columns = []
    col_index = []
    for (i, j) in pairs_idx:
        for m in monos:
            sparse: dict = {}
            mi = list(m)
            mi[i] += 1
            sparse[(j, tuple(mi))] = sparse.get((j, tuple(mi)), 0) + 1
            if i != j:
                mj = list(m)
                mj[j] += 1
                sparse[(i, tuple(mj))] = sparse.get((i, tuple(mj)), 0) + 1
            columns.append(sparse)
            col_index.append(((i, j), m))
    basis = blocked_nullspace(columns)
    if not basis:
        raise ZeroSubspaceError(f"constraint nullspace is zero for (n={n}, k={k})")
    rng = np.random.default_rng(seed)
    for s in range(samples):
        lams = [round(8 * g) for g in rng.standard_normal(len(basis))]
        if not any(lams):
            lams[0] = 1
        coeff = [0] * len(col_index)
        for lam, vec in zip(lams, basis):
            if lam:
                for t, x in enumerate(vec):
                    if x:
                        coeff[t] += lam * x
        P: dict = {}
        for ((i, j), m), c in zip(col_index, coeff):
            if c:
                P.setdefault((i, j), {})[m] = c
        polys = {
            key: HomogeneousPolynomial(n, k, terms) for key, terms in P.items()
        }
        hessians = {
            key: [[poly.diff(a).diff(b) for b in range(n)] for a in range(n)]
            for key, poly in polys.items()
        }
        for _ in range(pairs):
            v = [int(x) for x in rng.integers(-9, 10, n)]
            w0 = [int(x) for x in rng.integers(-9, 10, n)]
            vv = sum(x * x for x in v)
            vw = sum(a * b for a, b in zip(v, w0))
            w = [vv * b - vw * a for a, b in zip(v, w0)]
            if vv == 0 or all(x == 0 for x in w):
                continue
            lhs = 0
            rhs2 = 0  # sum_ij v_i v_j w^T Hess(P_ij)(v) w, i.e. 2*k(k-1)/2 * K(w,w,v..v,v,v)
            for (i, j), poly in polys.items():
                mult = 1 if i == j else 2
                lhs += mult * w[i] * w[j] * poly.evaluate_exact(v)
                hess = hessians[(i, j)]
                acc = 0
                for a in range(n):
                    if w[a] == 0:
                        continue
                    for b in range(n):
                        if w[b] == 0:
                            continue
                        q = hess[a][b]
                        if not q.is_zero():
                            acc += w[a] * w[b] * q.evaluate_exact(v)
                rhs2 += mult * v[i] * v[j] * acc
            if 2 * lhs != rhs2:
                return False
    return True


# ---------------------------------------------------------------------------
# rank-one projector fixture
# ---------------------------------------------------------------------------


def rank1_fixture(m: int) -> tuple[HarmonicField, Fraction]:
    """Degree-2 part of f(v) = (Jv)(Jv)^T and its ||iota_v .||^2 / ||.||^2 ratio.

    J is the block complex structure on R^{2m}; f is an even rank-one
    projector field with iota_v f = 0 and sphere mean (1/n) Id, so its
    degree-2 part f2 satisfies ||iota_v f2||^2 / ||f2||^2 = 1/(n(n-1)),
    the r = 1 case of r/(n(n-r)).
    """
    if m < 2:
        raise ValueError("need m >= 2")
    n = 2 * m

    def jv_entry(i: int) -> HomogeneousPolynomial:
        # (Jv)_{2t} = -v_{2t+1}, (Jv)_{2t+1} = v_{2t}
        if i % 2 == 0:
            return HomogeneousPolynomial.coordinate(n, i + 1).scale(-1)
        return HomogeneousPolynomial.coordinate(n, i - 1)

    rsq = HomogeneousPolynomial.radius_squared(n)
    comps = {}
    for i in range(n):
        for j in range(i, n):
            p = jv_entry(i) * jv_entry(j)
            if i == j:
                p = p - rsq.scale(Fraction(1, n))
            if not p.is_zero():
                comps[(i, j)] = p
    f2 = HarmonicField(n, 2, Bundle.sym2(), comps)
    iota = _iota_components(f2)
    norm_iota = Fraction(0)
    for poly in iota.values():
        norm_iota += poly.sphere_inner(poly)
    ratio = norm_iota / inner_product(f2, f2)
    return f2, ratio
