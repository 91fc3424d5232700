"""Geometry of the generalized upper half plane (Siegel space) of rank p.

Points are complex symmetric ``Z = X + iY`` with ``Y`` positive definite;
``Sp(2p, R)`` acts by ``Z -> (AZ + B)(CZ + D)^{-1}``.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass

import numpy as np
import scipy.linalg
import scipy.optimize

from .errors import InputError, NumericalError, SeriesCapError, ValidationError
from .polyinv import jensen_square_sum
from .symplinalg import SymplecticMatrix, char_poly, form_matrix

SYMMETRY_TOL = 1e-12
SERIES_REL_TOL = 1e-16
SERIES_MAX_TERMS = 100_000
ACTION_COND_MAX = 1e12


def _sym_defect(A: np.ndarray) -> float:
    return float(np.max(np.abs(A - A.T))) if A.size else 0.0


@dataclass(frozen=True, eq=False)
class SiegelPoint:
    """``Z = X + iY``; build with :func:`siegel_point`."""

    X: np.ndarray
    Y: np.ndarray
    symmetry_defect: float
    min_eig: float

    @property
    def p(self) -> int:
        return self.X.shape[0]

    @property
    def Z(self) -> np.ndarray:
        return self.X + 1j * self.Y

    def __repr__(self):
        return f"SiegelPoint(p={self.p}, min_eig={self.min_eig:.3g})"


def siegel_point(Z, Y=None, tol: float = SYMMETRY_TOL) -> SiegelPoint:
    """Validate and wrap a point, from complex ``Z`` or from real parts ``(X, Y)``.

    The symmetry tolerance is relative to ``max(1, max|entry|)``.
    """
    if Y is None:
        Zc = np.atleast_2d(np.asarray(Z, dtype=complex))
        X, Yr = Zc.real.copy(), Zc.imag.copy()
    else:
        X = np.atleast_2d(np.asarray(Z, dtype=float)).copy()
        Yr = np.atleast_2d(np.asarray(Y, dtype=float)).copy()
    if X.ndim != 2 or X.shape[0] != X.shape[1] or X.shape != Yr.shape or X.shape[0] == 0:
        raise InputError(f"Siegel points are square p x p matrices, got {X.shape} and {Yr.shape}")
    if not (np.all(np.isfinite(X)) and np.all(np.isfinite(Yr))):
        raise InputError("non-finite entries")
    scale = max(1.0, float(np.max(np.abs(X))), float(np.max(np.abs(Yr))))
    defect = max(_sym_defect(X), _sym_defect(Yr))
    if defect > tol * scale:
        raise ValidationError(f"Z is not symmetric (defect {defect:.3g})")
    X = 0.5 * (X + X.T)
    Yr = 0.5 * (Yr + Yr.T)
    min_eig = float(np.linalg.eigvalsh(Yr)[0])
    if not min_eig > 0:
        raise ValidationError(f"Im Z is not positive definite (least eigenvalue {min_eig:.3g})")
    return SiegelPoint(X, Yr, defect, min_eig)


def base_point(p: int) -> SiegelPoint:
    """The distinguished point ``iI``."""
    return siegel_point(np.zeros((p, p)), np.eye(p))


@dataclass(frozen=True, eq=False)
class SiegelTangent:
    base: SiegelPoint
    dZ: np.ndarray

    def __post_init__(self):
        dZ = np.atleast_2d(np.asarray(self.dZ, dtype=complex))
        if dZ.shape != self.base.X.shape:
            raise InputError("tangent vector shape does not match its base point")
        if np.max(np.abs(dZ - dZ.T)) > SYMMETRY_TOL * max(1.0, float(np.max(np.abs(dZ)))):
            raise ValidationError("tangent vector is not symmetric")
        object.__setattr__(self, "dZ", dZ)


@dataclass(frozen=True, eq=False)
class HodgeFrame:
    basis: np.ndarray
    gram: np.ndarray


# ---------------------------------------------------------------------------
# action, cross-ratio, distance


def act(M: SymplecticMatrix, Z: SiegelPoint) -> SiegelPoint:
    """Generalized fractional linear transformation ``(AZ + B)(CZ + D)^{-1}``."""
    if M.p != Z.p:
        raise InputError(f"dimension mismatch: matrix has p={M.p}, point has p={Z.p}")
    arr = M.array
    p = M.p
    A, B, C, D = arr[:p, :p], arr[:p, p:], arr[p:, :p], arr[p:, p:]
    Zc = Z.Z
    num = A @ Zc + B
    den = C @ Zc + D
    cond = np.linalg.cond(den)
    if not np.isfinite(cond) or cond > ACTION_COND_MAX:
        raise NumericalError(f"CZ + D is numerically singular (condition {cond:.3g}); corrupted input?")
    W = np.linalg.solve(den.T, num.T).T
    scale = max(1.0, float(np.max(np.abs(W))))
    asym = float(np.max(np.abs(W - W.T)))
    if asym > 1e-8 * scale * max(1.0, cond):
        raise NumericalError(f"image is not symmetric (defect {asym:.3g}); is M symplectic?")
    return siegel_point(0.5 * (W + W.T), tol=np.inf)


def cross_ratio(Z: SiegelPoint, W: SiegelPoint) -> np.ndarray:
    """``R = (Z-W)(Z-W̄)^{-1}(Z̄-W̄)(Z̄-W)^{-1}``; spectral radius checked below 1."""
    if Z.p != W.p:
        raise InputError("points live in different Siegel spaces")
    z, w = Z.Z, W.Z
    zb, wb = z.conj(), w.conj()
    try:
        # right divisions by solves; explicit inverses lose digits on ill-conditioned pairs
        left = np.linalg.solve((z - wb).T, (z - w).T).T
        right = np.linalg.solve((zb - w).T, (zb - wb).T).T
        R = left @ right
    except np.linalg.LinAlgError as exc:
        raise NumericalError(f"cross-ratio inversion failed: {exc}") from exc
    rad = float(np.max(np.abs(np.linalg.eigvals(R)))) if R.size else 0.0
    if rad >= 1 - 1e-14:
        raise NumericalError("points at infinite distance or invalid (cross-ratio spectral radius >= 1)")
    return R


def _dist_series(Z: SiegelPoint, W: SiegelPoint) -> float:
    R = cross_ratio(Z, W)
    p = Z.p
    S = np.eye(p, dtype=complex)
    power = np.eye(p, dtype=complex)
    m = 0
    while True:
        m += 1
        if m > SERIES_MAX_TERMS:
            raise SeriesCapError("points too far apart for series tolerance")
        power = power @ R
        term = power / (2 * m + 1)
        S = S + term
        if np.max(np.abs(term)) <= SERIES_REL_TOL * np.max(np.abs(S)):
            break
    val = np.trace(4 * R @ S @ S)
    # roundoff in R grows with the conditioning of Z - conj(W)
    kappa = float(np.linalg.cond(Z.Z - W.Z.conj()))
    if abs(val.imag) > max(1e-10, 1e-13 * kappa) * max(1.0, abs(val.real)):
        raise NumericalError(f"distance trace has imaginary residue {val.imag:.3g}")
    return math.sqrt(max(val.real, 0.0))


def positive_symplectic(Z: SiegelPoint) -> np.ndarray:
    """The positive definite symplectic matrix ``g g^T`` with ``g(iI) = Z``."""
    Yi = np.linalg.inv(Z.Y)
    X = Z.X
    top = np.hstack([Z.Y + X @ Yi @ X, X @ Yi])
    bot = np.hstack([Yi @ X, Yi])
    P = np.vstack([top, bot])
    return 0.5 * (P + P.T)


def _dist_spectral(Z: SiegelPoint, W: SiegelPoint) -> float:
    # affine-invariant distance on Sp/U(p): eigenvalues come in pairs mu, 1/mu
    mu = scipy.linalg.eigh(positive_symplectic(Z), positive_symplectic(W), eigvals_only=True)
    top = np.log(mu[-Z.p:])
    return math.sqrt(max(float(np.sum(top * top)), 0.0))


def dist(Z: SiegelPoint, W: SiegelPoint, method: str = "series") -> float:
    """Siegel distance.

    ``"series"`` evaluates ``sqrt(tr(4 R S^2))`` with ``S = sum R^m / (2m+1)``
    on the cross-ratio ``R``. ``"spectral"`` uses the eigenvalues of
    ``P_W^{-1} P_Z`` for the associated positive symplectic matrices; it
    stays accurate for far-apart points where the series would need too
    many terms.
    """
    if Z.p != W.p:
        raise InputError("points live in different Siegel spaces")
    if method == "series":
        return _dist_series(Z, W)
    if method == "spectral":
        return _dist_spectral(Z, W)
    raise InputError(f"unknown distance method {method!r}")


def tangent_norm(v: SiegelTangent) -> float:
    """Length of ``dZ`` in the metric ``tr(Y^{-1} dZ Y^{-1} conj(dZ))``."""
    Yi = np.linalg.inv(v.base.Y)
    val = np.trace(Yi @ v.dZ @ Yi @ v.dZ.conj())
    if abs(val.imag) > 1e-10 * max(1.0, abs(val.real)):
        raise NumericalError(f"metric value has imaginary residue {val.imag:.3g}")
    return math.sqrt(max(val.real, 0.0))


# ---------------------------------------------------------------------------
# translation length


def translation_length_closed(M: SymplecticMatrix) -> float:
    """``2 sqrt(w(P))`` for the characteristic polynomial ``P`` of ``M``."""
    return 2.0 * math.sqrt(jensen_square_sum(char_poly(M)))


def displacement(M: SymplecticMatrix, Z: SiegelPoint, method: str = "series") -> float:
    return dist(Z, act(M, Z), method)


@dataclass(frozen=True)
class NumericTranslation:
    estimate: float
    minimizer: SiegelPoint
    converged: bool
    evaluations: int
    best_start: int


def _sym_from_vec(v: np.ndarray, p: int) -> np.ndarray:
    out = np.zeros((p, p))
    out[np.triu_indices(p)] = v
    return out + np.triu(out, 1).T


def _chart(params: np.ndarray, p: int) -> SiegelPoint:
    k = p * (p + 1) // 2
    X = _sym_from_vec(params[:k], p)
    lam, V = np.linalg.eigh(_sym_from_vec(params[k:], p))
    Y = (V * np.exp(lam)) @ V.T
    return siegel_point(X, 0.5 * (Y + Y.T), tol=np.inf)


def translation_length_numeric(M: SymplecticMatrix, starts: int = 4, seed: int = 0,
                               budget: int = 5_000, spread: float = 0.5) -> NumericTranslation:
    """Minimize the displacement ``d(Z, MZ)`` by multi-start Nelder-Mead.

    The chart is ``Z = X + i expm(S)`` with ``X, S`` real symmetric; start 0
    is ``iI``, the others are seeded perturbations of it. Each start may use
    up to ``budget`` evaluations and is restarted from its best vertex until
    that stops helping. The estimate never undercuts the true infimum except
    through rounding; ``converged`` reports whether every best simplex
    shrank below diameter 1e-8.
    """
    if starts < 1 or budget < 1:
        raise InputError("starts and budget must be positive")
    p = M.p
    dim = p * (p + 1)
    rng = np.random.default_rng(seed)
    x0s = [np.zeros(dim)] + [rng.normal(scale=spread, size=dim) for _ in range(starts - 1)]

    k = p * (p + 1) // 2
    A = M.array

    def objective(x):
        # spectral route with P_{MZ} = M P_Z M^T, so no fractional linear step is needed
        X = _sym_from_vec(x[:k], p)
        lam, V = np.linalg.eigh(_sym_from_vec(x[k:], p))
        if not np.all(np.isfinite(lam)) or np.max(np.abs(lam)) > 300:
            return np.inf
        Y = (V * np.exp(lam)) @ V.T
        Yi = (V * np.exp(-lam)) @ V.T
        XYi = X @ Yi
        P = np.block([[Y + XYi @ X, XYi], [XYi.T, Yi]])
        P = 0.5 * (P + P.T)
        try:
            mu = scipy.linalg.eigh(A @ P @ A.T, P, eigvals_only=True)
        except (np.linalg.LinAlgError, ValueError):
            return np.inf
        if mu[0] <= 0:
            return np.inf
        return float(np.sum(np.log(mu[-p:]) ** 2))

    best = None
    total_evals = 0
    for idx, x0 in enumerate(x0s):
        x, fx, used, diam = x0, objective(x0), 1, np.inf
        step = 0.5
        for _restart in range(8):
            if used >= budget:
                break
            simplex = np.vstack([x] + [x + step * e for e in np.eye(dim)])
            res = scipy.optimize.minimize(
                objective, x, method="Nelder-Mead",
                options={"initial_simplex": simplex, "maxfev": budget - used,
                         "xatol": 1e-9, "fatol": 1e-12, "adaptive": dim > 4},
            )
            used += res.nfev
            fs = res.final_simplex[0]
            diam = float(np.max(np.linalg.norm(fs - fs[0], axis=1)))
            gain = fx - res.fun
            if res.fun <= fx:
                x, fx = res.x, res.fun
            if gain <= 1e-12 * max(1.0, fx):
                break
            step = max(0.1 * step, 10 * diam)
        total_evals += used
        if best is None or fx < best[1]:
            best = (x, fx, idx, diam < 1e-8)
    x, fx, idx, converged = best
    Z = _chart(x, p)
    try:
        est = displacement(M, Z, "series")
    except SeriesCapError:
        est = displacement(M, Z, "spectral")
    return NumericTranslation(est, Z, converged, total_evals, idx)


# ---------------------------------------------------------------------------
# Hodge structures


def _sqrtm_spd(Y: np.ndarray) -> tuple:
    lam, V = np.linalg.eigh(Y)
    r = np.sqrt(lam)
    return (V * r) @ V.T, (V / r) @ V.T


def hodge_subspace(Z: SiegelPoint) -> HodgeFrame:
    """Columns spanning ``V^{1,0}`` for ``Z``: ``g_Z [I; iI]`` with ``g_Z(iI) = Z``."""
    p = Z.p
    Yh, Yih = _sqrtm_spd(Z.Y)
    g = np.block([[Yh, Z.X @ Yih], [np.zeros((p, p)), Yih]])
    basis = g @ np.vstack([np.eye(p), 1j * np.eye(p)])
    J = form_matrix(p)
    gram = 0.5j * basis.T @ J @ basis.conj()
    if np.max(np.abs(gram - gram.conj().T)) > 1e-9 * max(1.0, float(np.max(np.abs(gram)))):
        raise NumericalError("Hodge Gram matrix is not Hermitian")
    gram = 0.5 * (gram + gram.conj().T)
    if np.linalg.eigvalsh(gram)[0] <= 0:
        raise NumericalError("Hodge form is not positive definite on the frame")
    if np.linalg.matrix_rank(np.hstack([basis, basis.conj()])) != 2 * p:
        raise NumericalError("frame and its conjugate do not span C^{2p}")
    return HodgeFrame(basis, gram)


def projector_distance(B1: np.ndarray, B2: np.ndarray) -> float:
    """Spectral-norm distance between orthogonal projectors onto two column spaces."""
    Q1, _ = np.linalg.qr(B1)
    Q2, _ = np.linalg.qr(B2)
    return float(np.linalg.norm(Q1 @ Q1.conj().T - Q2 @ Q2.conj().T, 2))


# ---------------------------------------------------------------------------
# text format


def parse_siegel_point(text: str) -> SiegelPoint:
    """First line ``p``, then ``p`` rows of X, then ``p`` rows of Y."""
    rows = [(i, ln) for i, ln in enumerate(text.splitlines(), 1)
            if ln.strip() and not ln.lstrip().startswith("#")]
    if not rows:
        raise InputError("empty Siegel point file")
    try:
        p = int(rows[0][1].strip())
    except ValueError:
        raise InputError("first line must be p", rows[0][0], 1)
    if p < 1 or len(rows) != 1 + 2 * p:
        raise InputError(f"expected {2 * p} matrix rows after p, found {len(rows) - 1}")
    vals = []
    for lineno, ln in rows[1:]:
        toks = list(re.finditer(r"\S+", ln))
        if len(toks) != p:
            raise InputError(f"expected {p} entries, found {len(toks)}", lineno, 1)
        row = []
        for t in toks:
            try:
                row.append(float(t.group()))
            except ValueError:
                raise InputError(f"cannot parse {t.group()!r}", lineno, t.start() + 1)
        vals.append(row)
    arr = np.array(vals)
    return siegel_point(arr[:p], arr[p:])


def format_siegel_point(Z: SiegelPoint) -> str:
    lines = [str(Z.p)]
    for M in (Z.X, Z.Y):
        lines.extend(" ".join(repr(float(x)) for x in row) for row in M)
    return "\n".join(lines) + "\n"
