"""Exterior and symmetric multilinear algebra over R^n with curvature models.

Vectors are plain numpy arrays.  A PForm stores coefficients over the
orthonormal basis wedges e_{i_1} ^ ... ^ e_{i_p} (strictly increasing index
subsets), for which the Gram-determinant pairing reduces to the plain dot
product of coefficient vectors.  Symmetric matrices are numpy arrays paired
by <A, B> = tr(AB).

Curvature tensors are algebraic (4,0) tensors with the usual symmetries,
normalized so that sectional curvatures lie in [-1, -delta]:

    kappa(a ^ b) = R(a, b, b, a) / (|a|^2 |b|^2 - <a, b>^2),

and the constant-curvature model G(a, b, c, d) = <a,c><b,d> - <b,c><a,d>
has kappa = -1 identically.  The centered remainder R0 = R - (1+delta)/2 G
satisfies |R0(a, b, c, d)| <= 2(1-delta)/3 on unit vectors; the complex
hyperbolic model (delta = 1/4) attains the bound.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass

import numpy as np

__all__ = [
    "ConvergenceError",
    "CurvatureTensor",
    "FormDerivation",
    "NotAntisymmetricError",
    "PForm",
    "Sym2Commutator",
    "ch_model",
    "constant_curvature_tensor",
    "extend_to_forms",
    "extend_to_sym2",
    "g_form_value",
    "g_tensor",
    "operator_norm_power",
    "r0_sharpness_search",
    "r0_split",
    "random_orthonormal_frame",
    "sym_inner",
    "wedge_contract_identity_check",
]


class NotAntisymmetricError(ValueError):
    """The operator expected to be skew-symmetric is not."""


class ConvergenceError(RuntimeError):
    """Power iteration failed to reach the requested tolerance."""


# ---------------------------------------------------------------------------
# constant curvature tensor
# ---------------------------------------------------------------------------


def g_tensor(a, b, c) -> np.ndarray:
    """G(a, b)c = <a,c> b - <b,c> a for same-dimension vectors."""
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    c = np.asarray(c, dtype=float)
    if not (a.shape == b.shape == c.shape):
        raise ValueError("g_tensor requires vectors of equal dimension")
    return float(a @ c) * b - float(b @ c) * a


def g_form_value(a, b, c, d) -> float:
    """The induced 4-tensor G(a, b, c, d) = <a,c><b,d> - <b,c><a,d>."""
    a, b, c, d = (np.asarray(x, dtype=float) for x in (a, b, c, d))
    return float(a @ c) * float(b @ d) - float(b @ c) * float(a @ d)


def _g_values(n: int) -> np.ndarray:
    eye = np.eye(n)
    return np.einsum("ac,bd->abcd", eye, eye) - np.einsum("bc,ad->abcd", eye, eye)


# ---------------------------------------------------------------------------
# curvature tensors
# ---------------------------------------------------------------------------


@dataclass
class CurvatureTensor:
    """Algebraic (4,0) curvature tensor on basis vectors, with pinching metadata."""

    n: int
    values: np.ndarray
    delta: float

    def __post_init__(self):
        self.values = np.asarray(self.values, dtype=float)
        if self.values.shape != (self.n,) * 4:
            raise ValueError("curvature values must have shape (n, n, n, n)")
        if not (0 < self.delta <= 1):
            raise ValueError("pinching constant must lie in (0, 1]")

    def value(self, a, b, c, d) -> float:
        return float(np.einsum("abcd,a,b,c,d->", self.values, a, b, c, d))

    def sectional(self, a, b) -> float:
        a = np.asarray(a, dtype=float)
        b = np.asarray(b, dtype=float)
        area2 = float(a @ a) * float(b @ b) - float(a @ b) ** 2
        if area2 <= 1e-14:
            raise ValueError("vectors do not span a 2-plane")
        return self.value(a, b, b, a) / area2

    def symmetry_defect(self) -> float:
        """Max deviation from the four index symmetries and the first Bianchi identity."""
        R = self.values
        d = max(
            float(np.abs(R + np.swapaxes(R, 0, 1)).max()),
            float(np.abs(R + np.swapaxes(R, 2, 3)).max()),
            float(np.abs(R - np.transpose(R, (2, 3, 0, 1))).max()),
            float(np.abs(R + np.transpose(R, (1, 2, 0, 3)) + np.transpose(R, (2, 0, 1, 3))).max()),
        )
        return d

    def check_pinching(self, seed: int = 0, samples: int = 1000, tol: float = 1e-12) -> bool:
        """Sectional curvature of sampled random planes lies in [-1, -delta]."""
        rng = np.random.default_rng(seed)
        frames = random_orthonormal_frame(rng, self.n, 2, batch=samples)
        a, b = frames[:, 0, :], frames[:, 1, :]
        kappa = np.einsum("abcd,fa,fb,fc,fd->f", self.values, a, b, b, a)
        return bool((kappa >= -1 - tol).all() and (kappa <= -self.delta + tol).all())


def constant_curvature_tensor(n: int, delta: float = 1.0) -> CurvatureTensor:
    """The model tensor G (sectional curvature constant -1)."""
    return CurvatureTensor(n=n, values=_g_values(n), delta=delta)


def r0_split(R: CurvatureTensor) -> CurvatureTensor:
    """Centered remainder R0 = R - (1+delta)/2 G; keeps all index symmetries."""
    vals = R.values - (1.0 + R.delta) / 2.0 * _g_values(R.n)
    return CurvatureTensor(n=R.n, values=vals, delta=R.delta)


def ch_model(m: int) -> CurvatureTensor:
    """Complex-hyperbolic curvature tensor on R^{2m}, pinched in [-1, -1/4].

    J is the standard block complex structure (J e_{2t} = e_{2t+1}).  The sign
    of the model is fixed by the postconditions kappa(e ^ Je) = -1 and
    kappa = -1/4 on totally real planes.
    """
    if m < 2:
        raise ValueError("need m >= 2 (real dimension >= 4)")
    n = 2 * m
    J = np.zeros((n, n))
    for t in range(m):
        J[2 * t + 1, 2 * t] = 1.0
        J[2 * t, 2 * t + 1] = -1.0
    vals = 0.25 * (
        _g_values(n)
        + np.einsum("ac,bd->abcd", J, J)
        - np.einsum("bc,ad->abcd", J, J)
        + 2.0 * np.einsum("ab,cd->abcd", J, J)
    )
    return CurvatureTensor(n=n, values=vals, delta=0.25)


# ---------------------------------------------------------------------------
# p-forms
# ---------------------------------------------------------------------------


class PForm:
    """A p-form as coefficients over strictly increasing basis index subsets."""

    __slots__ = ("n", "degree", "coeffs")

    def __init__(self, n: int, degree: int, coeffs: dict | None = None):
        if not (0 <= degree <= n):
            raise ValueError("form degree must satisfy 0 <= p <= n")
        self.n = n
        self.degree = degree
        self.coeffs = {}
        if coeffs:
            for idx, c in coeffs.items():
                idx = tuple(idx)
                if list(idx) != sorted(set(idx)) or (idx and (idx[0] < 0 or idx[-1] >= n)):
                    raise ValueError(f"index subset {idx} must be strictly increasing within 0..{n-1}")
                if len(idx) != degree:
                    raise ValueError("index subset size must equal the form degree")
                if c != 0:
                    self.coeffs[idx] = c

    @classmethod
    def basis(cls, n: int, subset) -> "PForm":
        subset = tuple(subset)
        return cls(n, len(subset), {subset: 1.0})

    @classmethod
    def from_vectors(cls, vectors) -> "PForm":
        """Pure wedge v_1 ^ ... ^ v_p; subset coefficients are minors."""
        mat = np.asarray(vectors, dtype=float)
        p, n = mat.shape
        coeffs = {}
        for subset in itertools.combinations(range(n), p):
            minor = np.linalg.det(mat[:, subset]) if p else 1.0
            if minor != 0:
                coeffs[subset] = minor
        return cls(n, p, coeffs)

    def inner(self, other: "PForm") -> float:
        """Gram-determinant pairing; the basis wedges are orthonormal."""
        if (self.n, self.degree) != (other.n, other.degree):
            raise ValueError("form mismatch")
        return float(sum(c * other.coeffs.get(idx, 0) for idx, c in self.coeffs.items()))

    def norm(self) -> float:
        return math.sqrt(max(self.inner(self), 0.0))

    def scale(self, s) -> "PForm":
        return PForm(self.n, self.degree, {i: c * s for i, c in self.coeffs.items()})

    def __add__(self, other: "PForm") -> "PForm":
        if (self.n, self.degree) != (other.n, other.degree):
            raise ValueError("form mismatch")
        coeffs = dict(self.coeffs)
        for idx, c in other.coeffs.items():
            s = coeffs.get(idx, 0) + c
            if s == 0:
                coeffs.pop(idx, None)
            else:
                coeffs[idx] = s
        return PForm(self.n, self.degree, coeffs)

    def __sub__(self, other: "PForm") -> "PForm":
        return self + other.scale(-1)

    def wedge(self, other: "PForm") -> "PForm":
        if self.n != other.n:
            raise ValueError("form mismatch")
        out: dict = {}
        for ia, ca in self.coeffs.items():
            for ib, cb in other.coeffs.items():
                if set(ia) & set(ib):
                    continue
                merged = tuple(sorted(ia + ib))
                sign = _merge_sign(ia, ib)
                s = out.get(merged, 0) + sign * ca * cb
                if s == 0:
                    out.pop(merged, None)
                else:
                    out[merged] = s
        return PForm(self.n, self.degree + other.degree, out)

    def contract(self, vector) -> "PForm":
        """Interior product iota_v."""
        v = np.asarray(vector, dtype=float)
        out: dict = {}
        for idx, c in self.coeffs.items():
            for t, i in enumerate(idx):
                if v[i] == 0:
                    continue
                rest = idx[:t] + idx[t + 1:]
                s = out.get(rest, 0) + ((-1) ** t) * v[i] * c
                if s == 0:
                    out.pop(rest, None)
                else:
                    out[rest] = s
        return PForm(self.n, self.degree - 1, out)

    def __repr__(self):
        return f"PForm(n={self.n}, p={self.degree}, {len(self.coeffs)} terms)"


def _merge_sign(ia: tuple, ib: tuple) -> int:
    """Sign of sorting the concatenation of two disjoint increasing tuples."""
    inv = 0
    for a in ia:
        for b in ib:
            if b < a:
                inv += 1
    return -1 if inv % 2 else 1


# ---------------------------------------------------------------------------
# operator extensions
# ---------------------------------------------------------------------------


def _require_skew(A: np.ndarray, tol: float = 1e-12) -> np.ndarray:
    A = np.asarray(A, dtype=float)
    if A.ndim != 2 or A.shape[0] != A.shape[1]:
        raise ValueError("operator must be a square matrix")
    defect = float(np.abs(A + A.T).max())
    if defect > tol:
        raise NotAntisymmetricError(f"operator is not antisymmetric (defect {defect:.3e})")
    return A


class FormDerivation:
    """Derivation extension of a skew operator A to Lambda^p R^n."""

    def __init__(self, A: np.ndarray, p: int):
        self.A = _require_skew(A)
        self.n = self.A.shape[0]
        if not (1 <= p <= self.n):
            raise ValueError("need 1 <= p <= n")
        self.p = p
        self.subsets = list(itertools.combinations(range(self.n), p))

    def apply(self, form: PForm) -> PForm:
        if form.degree != self.p or form.n != self.n:
            raise ValueError("form mismatch")
        out: dict = {}
        for idx, c in form.coeffs.items():
            for t, i in enumerate(idx):
                rest = idx[:t] + idx[t + 1:]
                col = self.A[:, i]
                for j in range(self.n):
                    if col[j] == 0 or j in rest:
                        continue
                    merged = tuple(sorted(rest + (j,)))
                    pos_j = merged.index(j)
                    sign = (-1) ** (t + pos_j)
                    s = out.get(merged, 0) + sign * col[j] * c
                    out[merged] = s
        return PForm(self.n, self.p, {k: v for k, v in out.items() if v != 0})

    def matrix(self) -> np.ndarray:
        """Matrix over the orthonormal basis wedges."""
        d = len(self.subsets)
        index = {s: i for i, s in enumerate(self.subsets)}
        M = np.zeros((d, d))
        for col, idx in enumerate(self.subsets):
            img = self.apply(PForm.basis(self.n, idx))
            for s, c in img.coeffs.items():
                M[index[s], col] = c
        return M


class Sym2Commutator:
    """Commutator action C -> [A, C] of a skew operator on symmetric matrices."""

    def __init__(self, A: np.ndarray):
        self.A = _require_skew(A)
        self.n = self.A.shape[0]

    def apply(self, C: np.ndarray) -> np.ndarray:
        C = np.asarray(C, dtype=float)
        return self.A @ C - C @ self.A

    def matrix(self) -> np.ndarray:
        """Matrix over an orthonormal basis of Sym^2 (diagonal + scaled off-diagonal)."""
        n = self.n
        basis = []
        for i in range(n):
            E = np.zeros((n, n))
            E[i, i] = 1.0
            basis.append(E)
        s = 1.0 / math.sqrt(2.0)
        for i in range(n):
            for j in range(i + 1, n):
                E = np.zeros((n, n))
                E[i, j] = E[j, i] = s
                basis.append(E)
        d = len(basis)
        M = np.zeros((d, d))
        for col, E in enumerate(basis):
            img = self.apply(E)
            for row, F in enumerate(basis):
                M[row, col] = float((img * F).sum())
        return M


def extend_to_forms(A: np.ndarray, p: int) -> FormDerivation:
    """Leibniz extension A^{Lambda^p}(e_{i_1} ^ ... ^ e_{i_p}) = sum_j ... ^ A e_{i_j} ^ ..."""
    return FormDerivation(A, p)


def extend_to_sym2(A: np.ndarray) -> Sym2Commutator:
    """Commutator extension C -> [A, C] = AC - CA on symmetric matrices."""
    return Sym2Commutator(A)


def sym_inner(A: np.ndarray, B: np.ndarray) -> float:
    """<A, B> = tr(AB) for symmetric matrices."""
    return float(np.trace(np.asarray(A) @ np.asarray(B)))


def wedge_contract_identity_check(p: int, n: int) -> bool:
    """Exact check of sum_i e_i ^ iota_{e_i} = p * id on the basis of Lambda^p R^n."""
    if not (1 <= p <= n):
        raise ValueError("need 1 <= p <= n")
    for subset in itertools.combinations(range(n), p):
        acc: dict = {}
        for i in range(n):
            if i not in subset:
                continue
            t = subset.index(i)
            rest = subset[:t] + subset[t + 1:]
            # e_i wedge (rest) with i re-inserted at position t: sign (-1)^t * (-1)^t = +1
            acc[subset] = acc.get(subset, 0) + 1
        if acc != {subset: p}:
            return False
    return True


# ---------------------------------------------------------------------------
# random frames and operator norms
# ---------------------------------------------------------------------------


def random_orthonormal_frame(rng: np.random.Generator, n: int, m: int, batch: int | None = None,
                             pivot_tol: float = 1e-8) -> np.ndarray:
    """Orthonormal m-frames in R^n by Gram-Schmidt on Gaussian draws.

    Degenerate draws (pivot below tolerance) are rejected and redrawn, so the
    output is always a full frame.  Returns shape (m, n), or (batch, m, n).
    """
    squeeze = batch is None
    b = 1 if batch is None else batch
    frames = np.empty((b, m, n))
    pending = np.arange(b)
    while pending.size:
        draws = rng.standard_normal((pending.size, m, n))
        ok = np.ones(pending.size, dtype=bool)
        for i in range(m):
            v = draws[:, i, :]
            for j in range(i):
                v -= np.einsum("fa,fa->f", v, draws[:, j, :])[:, None] * draws[:, j, :]
            norms = np.linalg.norm(v, axis=1)
            ok &= norms > pivot_tol
            norms[norms <= pivot_tol] = 1.0
            draws[:, i, :] = v / norms[:, None]
        frames[pending[ok]] = draws[ok]
        pending = pending[~ok]
    return frames[0] if squeeze else frames


def operator_norm_power(M: np.ndarray, rtol: float = 1e-10, max_iter: int = 10000,
                        seed: int = 0) -> float:
    """Operator norm (largest singular value) by power iteration on M^T M.

    Raises ConvergenceError if the relative change has not dropped below the
    tolerance within the iteration cap.
    """
    M = np.asarray(M, dtype=float)
    if M.size == 0:
        return 0.0
    G = M.T @ M
    rng = np.random.default_rng(seed)
    x = rng.standard_normal(G.shape[0])
    x /= np.linalg.norm(x)
    prev = 0.0
    for _ in range(max_iter):
        y = G @ x
        lam = float(x @ y)
        ny = np.linalg.norm(y)
        if ny == 0.0:
            return 0.0
        x = y / ny
        if prev > 0 and abs(lam - prev) <= rtol * abs(lam):
            return math.sqrt(max(lam, 0.0))
        prev = lam
    raise ConvergenceError(f"power iteration did not converge within {max_iter} iterations")


def r0_sharpness_search(R: CurvatureTensor, frames: int = 100000, seed: int = 0,
                        refine_iters: int = 400) -> tuple[float, np.ndarray]:
    """max |R0(a,b,c,d)| over random orthonormal 4-frames, plus local ascent.

    Random search locates the basin; ascent perturbs the best frame with
    shrinking Gaussian noise (re-orthonormalized) and keeps improvements.
    """
    R0 = r0_split(R).values
    rng = np.random.default_rng(seed)
    best_val = -1.0
    best_frame = None
    chunk = 20000
    done = 0
    while done < frames:
        b = min(chunk, frames - done)
        F = random_orthonormal_frame(rng, R.n, 4, batch=b)
        vals = np.abs(np.einsum("abcd,fa,fb,fc,fd->f", R0, F[:, 0], F[:, 1], F[:, 2], F[:, 3]))
        i = int(vals.argmax())
        if vals[i] > best_val:
            best_val = float(vals[i])
            best_frame = F[i].copy()
        done += b
    sigma = 0.2
    for _ in range(refine_iters):
        props = best_frame[None, :, :] + sigma * rng.standard_normal((64, 4, R.n))
        # re-orthonormalize proposals by QR (columns)
        q, _ = np.linalg.qr(np.transpose(props, (0, 2, 1)))
        props = np.transpose(q, (0, 2, 1))
        vals = np.abs(np.einsum("abcd,fa,fb,fc,fd->f", R0, props[:, 0], props[:, 1], props[:, 2], props[:, 3]))
        i = int(vals.argmax())
        if vals[i] > best_val:
            best_val = float(vals[i])
            best_frame = props[i].copy()
        else:
            sigma *= 0.7
            if sigma < 1e-9:
                break
    return best_val, best_frame
