"""Symplectic matrices in the basis x_1..x_p, y_1..y_p.

The symplectic form is ``omega(u, v) = u^T J v`` with ``J = [[0, I], [-I, 0]]``,
so ``M`` is symplectic iff ``M^T J M = J``, equivalently the three block
identities ``A^T C = C^T A``, ``D^T B = B^T D``, ``A^T D - C^T B = I``.

Matrices whose entries are all integers or :class:`fractions.Fraction` are
kept exact (numpy ``object`` arrays); anything containing a float is
floating and validated up to a tolerance.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from numbers import Rational

import numpy as np
import scipy.linalg

from .errors import InputError, NumericalError, ValidationError
from .polyinv import MonicPolynomial, parse_scalar

IDENTITY_NAMES = ("A^T C = C^T A", "D^T B = B^T D", "A^T D - C^T B = I")

#: Jordan-Chevalley eigenvector-matrix condition above which a factor is
#: not considered diagonalizable.
DIAGONALIZABILITY_THRESHOLD = 1e10


def _is_exact_scalar(x) -> bool:
    return isinstance(x, (int, np.integer, Rational)) and not isinstance(x, bool)


def _to_exact(x):
    x = Fraction(x) if not isinstance(x, int) else x
    if isinstance(x, Fraction) and x.denominator == 1:
        return x.numerator
    return x


def as_matrix(M) -> np.ndarray:
    """Coerce to a square 2-D array: ``object`` dtype when every entry is exact."""
    if isinstance(M, SymplecticMatrix):
        return M.entries
    arr = np.asarray(M, dtype=object) if not isinstance(M, np.ndarray) else M
    if arr.ndim != 2 or arr.shape[0] != arr.shape[1]:
        raise InputError(f"expected a square matrix, got shape {arr.shape}")
    if arr.dtype == object:
        flat = arr.ravel()
        if all(_is_exact_scalar(x) for x in flat):
            out = np.empty(arr.shape, dtype=object)
            out.ravel()[:] = [_to_exact(x) for x in flat]
            return out
        return np.array(arr, dtype=float)
    if np.issubdtype(arr.dtype, np.integer):
        out = np.empty(arr.shape, dtype=object)
        out.ravel()[:] = [int(x) for x in arr.ravel()]
        return out
    if np.iscomplexobj(arr):
        raise InputError("symplectic matrices must be real")
    return np.array(arr, dtype=float)


def form_matrix(p: int, exact: bool = False) -> np.ndarray:
    J = np.zeros((2 * p, 2 * p), dtype=object if exact else float)
    if exact:
        J[:] = 0
    for i in range(p):
        J[i, p + i] = 1
        J[p + i, i] = -1
    return J


def _identity(n: int, exact: bool) -> np.ndarray:
    if exact:
        out = np.empty((n, n), dtype=object)
        out[:] = 0
        for i in range(n):
            out[i, i] = 1
        return out
    return np.eye(n)


def _block_defects(M: np.ndarray) -> tuple:
    p = M.shape[0] // 2
    A, B, C, D = M[:p, :p], M[:p, p:], M[p:, :p], M[p:, p:]
    exact = M.dtype == object
    I = _identity(p, exact)
    diffs = (A.T @ C - C.T @ A, D.T @ B - B.T @ D, A.T @ D - C.T @ B - I)
    out = []
    for d in diffs:
        if exact:
            out.append(max((abs(x) for x in d.ravel()), default=0))
        else:
            out.append(float(np.max(np.abs(d))) if d.size else 0.0)
    return tuple(out)


@dataclass(frozen=True, eq=False)
class SymplecticMatrix:
    """A validated ``2p x 2p`` symplectic matrix.

    Use :func:`validate_symplectic` rather than the constructor.
    """

    entries: np.ndarray
    tolerance: float
    defect: float

    @property
    def p(self) -> int:
        return self.entries.shape[0] // 2

    @property
    def exact(self) -> bool:
        return self.entries.dtype == object

    @property
    def array(self) -> np.ndarray:
        """Floating copy of the entries."""
        return self.entries.astype(float)

    @property
    def A(self):
        return self.entries[: self.p, : self.p]

    @property
    def B(self):
        return self.entries[: self.p, self.p:]

    @property
    def C(self):
        return self.entries[self.p:, : self.p]

    @property
    def D(self):
        return self.entries[self.p:, self.p:]

    def __matmul__(self, other: "SymplecticMatrix") -> "SymplecticMatrix":
        prod = self.entries @ other.entries
        return _wrap(prod, max(self.tolerance, other.tolerance))

    def inverse(self) -> "SymplecticMatrix":
        """``M^{-1} = -J M^T J``; exact for exact inputs."""
        J = form_matrix(self.p, self.exact)
        return _wrap(-(J @ self.entries.T @ J), self.tolerance)

    def __eq__(self, other):
        if not isinstance(other, SymplecticMatrix):
            return NotImplemented
        return self.entries.shape == other.entries.shape and bool(np.all(self.entries == other.entries))

    def __repr__(self):
        return f"SymplecticMatrix(p={self.p}, exact={self.exact}, defect={float(self.defect):.3g})"


def _wrap(M: np.ndarray, tol: float) -> SymplecticMatrix:
    # products/inverses of validated matrices: record the defect, loosen tolerance if needed
    defect = max(_block_defects(M))
    return SymplecticMatrix(M, max(tol, float(defect)), defect)


def validate_symplectic(M, tol: float = 1e-9) -> SymplecticMatrix:
    """Check the block identities and wrap ``M``.

    Exact matrices must satisfy them exactly, whatever ``tol`` is.
    """
    if tol < 0:
        raise InputError("tolerance must be nonnegative")
    arr = as_matrix(M)
    n = arr.shape[0]
    if n == 0 or n % 2:
        raise InputError(f"symplectic matrices have even positive dimension, got {n}")
    if arr.dtype != object and not np.all(np.isfinite(arr)):
        raise InputError("matrix has non-finite entries")
    defects = _block_defects(arr)
    exact = arr.dtype == object
    for name, d in zip(IDENTITY_NAMES, defects):
        if (exact and d != 0) or (not exact and d > tol):
            raise ValidationError(f"not symplectic: identity {name} violated (defect {float(d):.3g})")
    return SymplecticMatrix(arr, float(tol), max(defects))


# ---------------------------------------------------------------------------
# normal-form blocks


def _rot(theta: float) -> np.ndarray:
    c, s = math.cos(theta), math.sin(theta)
    return np.array([[c, -s], [s, c]])


def block_hyperbolic(lam) -> SymplecticMatrix:
    """``diag(lam, 1/lam)``; exact for rational ``lam``."""
    if _is_exact_scalar(lam):
        lam = Fraction(lam)
        if abs(lam) <= 1:
            raise InputError("hyperbolic block needs |lambda| > 1")
        return validate_symplectic([[_to_exact(lam), 0], [0, _to_exact(1 / lam)]], 0.0)
    lam = float(lam)
    if not abs(lam) > 1 or not math.isfinite(lam):
        raise InputError("hyperbolic block needs finite |lambda| > 1")
    return validate_symplectic(np.diag([lam, 1.0 / lam]), 1e-14)


def block_elliptic(theta: float) -> SymplecticMatrix:
    """Rotation by ``theta`` in the (x, y) plane; eigenvalues ``exp(+-i theta)``."""
    if not math.isfinite(theta):
        raise InputError("angle must be finite")
    return validate_symplectic(_rot(theta), 1e-14)


def block_central(sign: int) -> SymplecticMatrix:
    if sign not in (1, -1):
        raise InputError("central block sign must be +1 or -1")
    return validate_symplectic([[sign, 0], [0, sign]], 0.0)


def block_loxodromic(rho: float, theta: float) -> SymplecticMatrix:
    """``A = rho Rot(theta)``, ``D = Rot(theta) / rho``; eigenvalues ``rho^{+-1} e^{+-i theta}``."""
    if not (math.isfinite(rho) and rho > 1 and math.isfinite(theta)):
        raise InputError("loxodromic block needs rho > 1 and finite theta")
    M = np.zeros((4, 4))
    M[:2, :2] = rho * _rot(theta)
    M[2:, 2:] = _rot(theta) / rho
    return validate_symplectic(M, 1e-14)


def direct_sum(M1: SymplecticMatrix, M2: SymplecticMatrix) -> SymplecticMatrix:
    """Symplectic direct sum; x-coordinates of both summands first, then y-coordinates."""
    p1, p2 = M1.p, M2.p
    p = p1 + p2
    exact = M1.exact and M2.exact
    a, b = (M1.entries, M2.entries) if exact else (M1.array, M2.array)
    out = np.zeros((2 * p, 2 * p), dtype=object if exact else float)
    if exact:
        out[:] = 0
    idx1 = list(range(p1)) + [p + i for i in range(p1)]
    idx2 = [p1 + i for i in range(p2)] + [p + p1 + i for i in range(p2)]
    out[np.ix_(idx1, idx1)] = a
    out[np.ix_(idx2, idx2)] = b
    return _wrap(out, max(M1.tolerance, M2.tolerance))


# ---------------------------------------------------------------------------
# random corpus


def _unimodular(p: int, rng: np.random.Generator, steps: int = 3) -> np.ndarray:
    Q = _identity(p, True)
    for _ in range(steps):
        if p == 1:
            Q = Q * int(rng.choice([-1, 1]))
            continue
        i, j = rng.choice(p, size=2, replace=False)
        E = _identity(p, True)
        E[i, j] = int(rng.integers(-1, 2))
        Q = Q @ E
    return Q


def random_symplectic(p: int, seed: int = 0, word_length: int = 4, exact: bool = False,
                      max_norm: float = 1e6) -> SymplecticMatrix:
    """Deterministic product of ``word_length`` random symplectic generators.

    Generators are ``diag(Q, Q^{-T})`` and the upper/lower shears
    ``[[I, S], [0, I]]``, ``[[I, 0], [S, I]]`` with ``S`` symmetric. A factor
    that would push the operator norm of the product past ``max_norm`` is
    redrawn. With ``exact`` the generators are integral.
    """
    if p < 1 or word_length < 0:
        raise InputError("need p >= 1 and word_length >= 0")
    rng = np.random.default_rng(seed)
    n = 2 * p
    prod = _identity(n, exact)
    for _ in range(word_length):
        for _attempt in range(100):
            kind = int(rng.integers(3))
            G = _identity(n, exact)
            if kind == 0:
                if exact:
                    Q = _unimodular(p, rng)
                    Qit = np.array(np.round(np.linalg.inv(Q.astype(float)).T), dtype=int).astype(object)
                else:
                    Q = rng.normal(size=(p, p))
                    if np.linalg.cond(Q) > 20:
                        continue
                    Qit = np.linalg.inv(Q).T
                G[:p, :p] = Q
                G[p:, p:] = Qit
            else:
                if exact:
                    S = rng.integers(-2, 3, size=(p, p))
                    S = np.triu(S) + np.triu(S, 1).T
                    S = S.astype(object)
                    S = np.vectorize(int, otypes=[object])(S)
                else:
                    S = rng.uniform(-1.0, 1.0, size=(p, p))
                    S = 0.5 * (S + S.T)
                if kind == 1:
                    G[:p, p:] = S
                else:
                    G[p:, :p] = S
            cand = prod @ G
            if np.linalg.norm(cand.astype(float), 2) <= max_norm:
                prod = cand
                break
    return validate_symplectic(prod, 1e-9) if not exact else validate_symplectic(prod, 0.0)


# ---------------------------------------------------------------------------
# characteristic polynomials


def _hessenberg_charpoly(H: np.ndarray) -> np.ndarray:
    """Characteristic polynomial (descending) of an upper Hessenberg float matrix."""
    n = H.shape[0]
    polys = [np.array([1.0])]
    for k in range(n):
        # p_{k+1} = (z - h_kk) p_k - sum_{i<k} h_ik * prod_{j=i+1..k} h_{j,j-1} * p_i
        nxt = np.concatenate([polys[k], [0.0]]) - H[k, k] * np.concatenate([[0.0], polys[k]])
        beta = 1.0
        for i in range(k - 1, -1, -1):
            beta *= H[i + 1, i]
            term = beta * H[i, k] * polys[i]
            nxt[-len(term):] -= term
        polys.append(nxt)
    return polys[n]


@lru_cache(maxsize=1)
def _primes() -> tuple:
    """Primes just below 2**25, descending; products stay well inside int64."""
    out = []
    c = 2**25 - 1
    while len(out) < 4000:
        if all(c % q for q in range(3, int(c**0.5) + 1, 2)):
            out.append(c)
        c -= 2
    return tuple(out)


def _charpoly_mod(M: np.ndarray, q: int) -> np.ndarray:
    A = M % q
    n = A.shape[0]
    for j in range(n - 2):
        nz = np.nonzero(A[j + 1:, j])[0]
        if nz.size == 0:
            continue
        i = j + 1 + int(nz[0])
        if i != j + 1:
            A[[i, j + 1], :] = A[[j + 1, i], :]
            A[:, [i, j + 1]] = A[:, [j + 1, i]]
        inv = pow(int(A[j + 1, j]), q - 2, q)
        m = (A[j + 2:, j] * inv) % q
        if not m.any():
            continue
        A[j + 2:, :] = (A[j + 2:, :] - (m[:, None] * A[j + 1, :][None, :]) % q) % q
        A[:, j + 1] = (A[:, j + 1] + (A[:, j + 2:] @ m) % q) % q
    polys = [np.array([1], dtype=np.int64)]
    for k in range(n):
        nxt = np.concatenate([polys[k], [0]]) - (A[k, k] * np.concatenate([[0], polys[k]])) % q
        beta = 1
        for i in range(k - 1, -1, -1):
            beta = beta * int(A[i + 1, i]) % q
            if beta == 0:
                break
            coef = beta * int(A[i, k]) % q
            if coef:
                nxt[-len(polys[i]):] -= (coef * polys[i]) % q
        polys.append(nxt % q)
    return polys[n]


def _charpoly_integer(M: np.ndarray) -> list:
    """Exact characteristic polynomial of an integer matrix (multimodular Hessenberg + CRT)."""
    n = M.shape[0]
    ints = [[int(x) for x in row] for row in M]
    # |c_k| <= sum of k x k principal minors <= 2^n * prod max(1, ||row||)
    log2_bound = n + sum(max(0.0, 0.5 * math.log2(max(1, sum(x * x for x in row)))) for row in ints)
    modulus, residues = 1, None
    primes = _primes()
    used = 0
    while modulus.bit_length() <= log2_bound + 2:
        if used >= len(primes):
            raise NumericalError("ran out of CRT primes")
        q = primes[used]
        used += 1
        Mq = np.array([[x % q for x in row] for row in ints], dtype=np.int64)
        r = [int(x) for x in _charpoly_mod(Mq, q)]
        if residues is None:
            residues = r
        else:
            # combine x = residues (mod modulus) with r (mod q)
            inv = pow(modulus % q, -1, q)
            residues = [a + modulus * (((b - a) * inv) % q) for a, b in zip(residues, r)]
        modulus *= q
    half = modulus // 2
    return [c - modulus if c > half else c for c in residues]


def char_poly_faddeev(M) -> MonicPolynomial:
    """Faddeev-LeVerrier over exact rationals (O(n^4)); independent check for small matrices."""
    arr = as_matrix(M)
    if arr.dtype != object:
        raise InputError("Faddeev-LeVerrier route requires exact entries")
    n = arr.shape[0]
    I = _identity(n, True)
    coeffs = [Fraction(1)]
    Mk = np.empty((n, n), dtype=object)
    Mk[:] = Fraction(0)
    c = Fraction(1)
    for k in range(1, n + 1):
        Mk = arr @ Mk + c * I
        AM = arr @ Mk
        c = -Fraction(sum(AM[i, i] for i in range(n))) / k
        coeffs.append(c)
    return MonicPolynomial(tuple(coeffs))


def char_poly(M, method: str = "auto") -> MonicPolynomial:
    """Characteristic polynomial ``det(zI - M)``, monic of degree ``2p``.

    Exact entries give an exact polynomial: ``method="faddeev"`` uses
    Faddeev-LeVerrier, ``"modular"`` reduces modulo word-size primes to
    Hessenberg form and lifts by CRT; ``"auto"`` picks Faddeev-LeVerrier up
    to dimension 12. Floating entries use a real Hessenberg reduction.
    """
    arr = as_matrix(M)
    n = arr.shape[0]
    if arr.dtype != object:
        if n == 0:
            return MonicPolynomial((1.0,))
        H = scipy.linalg.hessenberg(arr)
        return MonicPolynomial(tuple(float(c) for c in _hessenberg_charpoly(H)), "floating")
    if method == "auto":
        method = "faddeev" if n <= 12 else "modular"
    if method == "faddeev":
        return char_poly_faddeev(arr)
    if method != "modular":
        raise InputError(f"unknown char_poly method {method!r}")
    den = 1
    for x in arr.ravel():
        if isinstance(x, Fraction):
            den = den * x.denominator // math.gcd(den, x.denominator)
    scaled = np.vectorize(lambda x: int(x * den), otypes=[object])(arr) if den > 1 else arr
    c = _charpoly_integer(scaled)
    if den == 1:
        return MonicPolynomial(tuple(c))
    return MonicPolynomial(tuple(Fraction(ck, den**k) for k, ck in enumerate(c)))


# ---------------------------------------------------------------------------
# Jordan-Chevalley


@dataclass(frozen=True)
class JordanChevalleyPair:
    semisimple: SymplecticMatrix
    unipotent: SymplecticMatrix
    residual: float
    eigvec_condition: float


def _cluster(vals: np.ndarray, tol: float) -> list:
    n = len(vals)
    parent = list(range(n))

    def find(i):
        while parent[i] != i:
            parent[i] = parent[parent[i]]
            i = parent[i]
        return i

    for i in range(n):
        for j in range(i + 1, n):
            if abs(vals[i] - vals[j]) <= tol:
                parent[find(i)] = find(j)
    groups = {}
    for i in range(n):
        groups.setdefault(find(i), []).append(i)
    clusters = list(groups.values())
    for a in range(len(clusters)):
        for b in range(a + 1, len(clusters)):
            gap = min(abs(vals[i] - vals[j]) for i in clusters[a] for j in clusters[b])
            if gap <= 3 * tol:
                raise NumericalError(
                    f"eigenvalue clusters {gap:.3g} apart are within 2*tol of merging; choose another cluster tolerance"
                )
    return clusters


def jordan_chevalley(M: SymplecticMatrix, cluster_tol: float = 1e-6) -> JordanChevalleyPair:
    """Semisimple and unipotent factors ``M = S U = U S``.

    Eigenvalues are clustered at ``cluster_tol``; ``S`` is the polynomial in
    ``M`` acting on each generalized eigenspace as its cluster mean, found
    by Newton's iteration ``S <- S - P(S) P'(S)^{-1}`` on the polynomial
    ``P`` whose simple roots are the cluster means.
    """
    if cluster_tol <= 0:
        raise InputError("cluster tolerance must be positive")
    A = M.array
    n = A.shape[0]
    vals = np.linalg.eigvals(A)
    clusters = _cluster(vals, cluster_tol)
    reps = [complex(np.mean(vals[c])) for c in clusters]
    I = np.eye(n)

    def P_and_dP(S):
        facs = [S - r * I for r in reps]
        P = np.eye(n, dtype=complex)
        for f in facs:
            P = P @ f
        dP = np.zeros((n, n), dtype=complex)
        for k in range(len(facs)):
            term = np.eye(n, dtype=complex)
            for j, f in enumerate(facs):
                if j != k:
                    term = term @ f
            dP += term
        return P.real, dP.real

    S = A.copy()
    for _ in range(60):
        P, dP = P_and_dP(S)
        if np.max(np.abs(P)) <= 1e-15 * max(1.0, np.max(np.abs(S))) ** len(reps):
            break
        step = np.linalg.solve(dP, P)
        S = S - step
        if np.max(np.abs(step)) <= 1e-15 * max(1.0, np.max(np.abs(S))):
            break
    U = np.linalg.solve(S, A)
    N = U - I
    Np = np.linalg.matrix_power(N, n)
    residual = float(max(np.max(np.abs(S @ U - A)), np.max(np.abs(U @ S - A)), np.max(np.abs(Np))))
    _, vecs = np.linalg.eig(S)
    cond = float(np.linalg.cond(vecs))
    if not np.isfinite(cond) or cond > DIAGONALIZABILITY_THRESHOLD:
        raise NumericalError(f"semisimple factor is not numerically diagonalizable (cond {cond:.3g})")
    tol = max(M.tolerance, 1e-6, 10 * residual)
    return JordanChevalleyPair(validate_symplectic(S, tol), validate_symplectic(U, tol), residual, cond)


def _binom(r, j: int):
    out = Fraction(1) if isinstance(r, (int, Fraction)) else 1.0
    for i in range(j):
        out = out * (r - i) / (i + 1)
    return out


def unipotent_power(U: SymplecticMatrix, r) -> SymplecticMatrix:
    """``U**r = sum_j binom(r, j) (U - I)**j`` for unipotent ``U``.

    Exact when ``U`` is exact and ``r`` is an int or Fraction.
    """
    n = U.entries.shape[0]
    exact = U.exact and isinstance(r, (int, Fraction)) and not isinstance(r, bool)
    if exact:
        N = U.entries - _identity(n, True)
        if np.any(np.linalg.matrix_power(N, n) != 0):
            raise InputError("matrix is not unipotent: (U - I)^(2p) != 0")
        r = Fraction(r)
    else:
        N = U.array - np.eye(n)
        if np.max(np.abs(np.linalg.matrix_power(N, n))) > 1e-10:
            raise InputError("matrix is not unipotent: (U - I)^(2p) is not below 1e-10")
        r = float(r)
    out = _identity(n, exact)
    term = _identity(n, exact)
    for j in range(1, n):
        term = term @ N
        out = out + _binom(r, j) * term
    if exact:
        out = np.vectorize(_to_exact, otypes=[object])(out)
        return validate_symplectic(out, 0.0)
    return validate_symplectic(out, max(U.tolerance, 1e-9))


# ---------------------------------------------------------------------------
# text format


def parse_matrix(text: str) -> np.ndarray:
    """Parse the matrix format: first line ``p``, then ``2p`` rows of ``2p`` scalars."""
    rows = [(i, ln) for i, ln in enumerate(text.splitlines(), 1)
            if ln.strip() and not ln.lstrip().startswith("#")]
    if not rows:
        raise InputError("empty matrix file")
    first_line, first = rows[0]
    try:
        p = int(first.strip())
    except ValueError:
        raise InputError(f"first line must be the half-rank p, got {first.strip()!r}", first_line, 1)
    if p < 1:
        raise InputError("p must be positive", first_line, 1)
    body = rows[1:]
    if len(body) != 2 * p:
        raise InputError(f"expected {2 * p} matrix rows, found {len(body)}")
    out = []
    for lineno, ln in body:
        toks = list(re.finditer(r"\S+", ln))
        if len(toks) != 2 * p:
            raise InputError(f"expected {2 * p} entries, found {len(toks)}", lineno, 1)
        out.append([parse_scalar(t.group(), lineno, t.start() + 1) for t in toks])
    return as_matrix(np.array(out, dtype=object))


def format_matrix(M) -> str:
    arr = as_matrix(M)
    lines = [str(arr.shape[0] // 2)]
    for row in arr:
        lines.append(" ".join(repr(float(x)) if isinstance(x, float) else str(x) for x in row))
    return "\n".join(lines) + "\n"
