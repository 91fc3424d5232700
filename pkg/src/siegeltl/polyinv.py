"""Polynomial invariants: logarithmic Mahler measure, Jensen square sum, log-house.

All invariants are computed from the root multiset of a monic polynomial.
Exact polynomials (integer or rational coefficients) are first split into
square-free factors with exact integer arithmetic, so that repeated roots
such as those of ``(z - 1)**34`` never reach the eigenvalue solver.
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

from .errors import InputError, NumericalError

EXACT_INTEGER = "exact-integer"
EXACT_RATIONAL = "exact-rational"
FLOATING = "floating"

#: Computed roots with ``abs(abs(root) - 1) <= UNIMODULAR_SNAP`` contribute nothing.
UNIMODULAR_SNAP = 1e-9

#: Node cap for the adaptive quadrature.
QUADRATURE_MAX_NODES = 2**20


def _normalize_scalar(c):
    if isinstance(c, bool):
        raise InputError(f"boolean is not a polynomial coefficient: {c!r}")
    if isinstance(c, int):
        return c
    if isinstance(c, Rational):
        c = Fraction(c)
        return c.numerator if c.denominator == 1 else c
    if isinstance(c, (float, np.floating)):
        return float(c)
    if isinstance(c, np.integer):
        return int(c)
    raise InputError(f"unsupported coefficient type {type(c).__name__}")


@dataclass(frozen=True)
class MonicPolynomial:
    """Monic polynomial with coefficients listed from the leading term down.

    ``kind`` is one of ``"exact-integer"``, ``"exact-rational"`` or
    ``"floating"`` and is inferred from the coefficients when omitted.
    """

    coefficients: tuple
    kind: str = ""

    def __post_init__(self):
        coeffs = tuple(_normalize_scalar(c) for c in self.coefficients)
        if not coeffs:
            raise InputError("a polynomial needs at least its leading coefficient")
        if coeffs[0] != 1:
            raise InputError(f"leading coefficient must be exactly 1, got {coeffs[0]!r}")
        if any(isinstance(c, float) for c in coeffs):
            inferred = FLOATING
            coeffs = tuple(float(c) for c in coeffs)
        elif any(isinstance(c, Fraction) for c in coeffs):
            inferred = EXACT_RATIONAL
        else:
            inferred = EXACT_INTEGER
        kind = self.kind or inferred
        if kind not in (EXACT_INTEGER, EXACT_RATIONAL, FLOATING):
            raise InputError(f"unknown coefficient kind {kind!r}")
        if kind == EXACT_INTEGER and inferred != EXACT_INTEGER:
            raise InputError("coefficients are not all integers")
        if kind == EXACT_RATIONAL and inferred == FLOATING:
            raise InputError("floating coefficients cannot carry an exact kind")
        if kind == FLOATING:
            coeffs = tuple(float(c) for c in coeffs)
        object.__setattr__(self, "coefficients", coeffs)
        object.__setattr__(self, "kind", kind)

    @property
    def degree(self) -> int:
        return len(self.coefficients) - 1

    @property
    def is_exact(self) -> bool:
        return self.kind != FLOATING

    @classmethod
    def from_roots(cls, roots) -> "MonicPolynomial":
        """Expand ``prod(z - r)``; exact when every root is an integer or rational."""
        coeffs = [1]
        for r in roots:
            r = _normalize_scalar(r) if not isinstance(r, complex) else r
            shifted = coeffs + [0]
            for i in range(1, len(shifted)):
                shifted[i] -= r * coeffs[i - 1]
            coeffs = shifted
        if any(isinstance(c, complex) for c in coeffs):
            coeffs = [c.real for c in coeffs]
        return cls(tuple(coeffs))

    def __mul__(self, other: "MonicPolynomial") -> "MonicPolynomial":
        a, b = self.coefficients, other.coefficients
        out = [0] * (len(a) + len(b) - 1)
        for i, x in enumerate(a):
            for j, y in enumerate(b):
                out[i + j] += x * y
        return MonicPolynomial(tuple(out))

    def __call__(self, z):
        acc = 0
        for c in self.coefficients:
            acc = acc * z + c
        return acc

    def float_coefficients(self) -> np.ndarray:
        return np.array([float(c) for c in self.coefficients])

    def __str__(self):
        return " ".join(str(c) for c in self.coefficients)


@dataclass(frozen=True)
class RootMultiset:
    """Distinct complex roots with multiplicities.

    ``source_tolerance`` is the largest Newton correction ``|p(r)/p'(r)|``
    over the computed roots of the (square-free) factors, a rough
    forward-error indicator.
    """

    entries: tuple
    source_tolerance: float = 0.0

    @property
    def degree(self) -> int:
        return sum(m for _, m in self.entries)

    def values(self) -> np.ndarray:
        """All roots repeated according to multiplicity."""
        out = []
        for r, m in self.entries:
            out.extend([r] * m)
        return np.array(out, dtype=complex)

    def multiplicities(self) -> np.ndarray:
        return np.array([m for _, m in self.entries], dtype=int)

    def distinct(self) -> np.ndarray:
        return np.array([r for r, _ in self.entries], dtype=complex)


# ---------------------------------------------------------------------------
# parsing

_INT_RE = re.compile(r"^[+-]?\d+$")
_RAT_RE = re.compile(r"^[+-]?\d+/\d+$")
_DEC_RE = re.compile(r"^[+-]?(\d+\.\d*|\.\d+|\d+)([eE][+-]?\d+)?$")


def parse_scalar(token: str, line: int | None = None, column: int | None = None):
    """Parse an integer, ``a/b`` rational or decimal literal.

    Integers and rationals come back exact; decimals come back as ``float``.
    """
    if _INT_RE.match(token):
        return int(token)
    if _RAT_RE.match(token):
        num, den = token.split("/")
        if int(den) == 0:
            raise InputError(f"zero denominator in {token!r}", line, column)
        return Fraction(int(num), int(den))
    if _DEC_RE.match(token):
        return float(token)
    raise InputError(f"cannot parse scalar {token!r}", line, column)


def parse_polynomial(text: str) -> MonicPolynomial:
    """Parse the one-line polynomial format (coefficients, descending powers)."""
    lines = [ln for ln in text.splitlines() if ln.strip() and not ln.lstrip().startswith("#")]
    if len(lines) != 1:
        raise InputError(f"expected exactly one non-empty line, found {len(lines)}")
    lineno = next(i for i, ln in enumerate(text.splitlines(), 1) if ln.strip() and not ln.lstrip().startswith("#"))
    raw = text.splitlines()[lineno - 1]
    coeffs = []
    for m in re.finditer(r"\S+", raw):
        coeffs.append(parse_scalar(m.group(), lineno, m.start() + 1))
    if m_first := re.search(r"\S+", raw):
        if m_first.group() != "1":
            raise InputError("leading coefficient must be written literally as 1", lineno, m_first.start() + 1)
    return MonicPolynomial(tuple(coeffs))


def format_polynomial(p: MonicPolynomial) -> str:
    return str(p) + "\n"


# ---------------------------------------------------------------------------
# exact integer polynomial arithmetic (descending coefficient lists)


def _strip(a: list) -> list:
    i = 0
    while i < len(a) - 1 and a[i] == 0:
        i += 1
    return a[i:]


def _content(a: list) -> int:
    g = 0
    for c in a:
        g = math.gcd(g, c)
        if g == 1:
            break
    return g


def _primitive(a: list) -> list:
    a = _strip(a)
    g = _content(a)
    if g == 0:
        return [0]
    if a[0] < 0:
        g = -g
    return [c // g for c in a]


def _derivative(a: list) -> list:
    d = len(a) - 1
    if d == 0:
        return [0]
    return [c * (d - i) for i, c in enumerate(a[:-1])]


def _prem(a: list, b: list) -> list:
    """Pseudo-remainder of ``a`` by ``b`` over the integers."""
    a = list(a)
    db = len(b) - 1
    lb = b[0]
    while len(a) - 1 >= db and any(a):
        lead = a[0]
        a = [lb * c for c in a]
        for i in range(1, len(b)):
            a[i] -= lead * b[i]
        a = a[1:]
        if not a:
            return [0]
        a = _strip(a)
        if a == [0]:
            return [0]
    return _strip(a)


def _gcd(a: list, b: list) -> list:
    """Primitive gcd with positive leading coefficient (primitive PRS)."""
    a, b = _primitive(a), _primitive(b)
    if len(a) < len(b):
        a, b = b, a
    while b != [0]:
        r = _prem(a, b)
        a, b = b, (_primitive(r) if r != [0] else [0])
    return _primitive(a)


def _exact_div(a: list, b: list) -> list:
    """Quotient of integer polynomials, asserting zero remainder and integral quotient."""
    a = list(a)
    db = len(b) - 1
    q = []
    while len(a) - 1 >= db:
        lead, rem = divmod(a[0], b[0])
        if rem:
            raise ArithmeticError("non-integral quotient")
        q.append(lead)
        for i in range(len(b)):
            a[i] -= lead * b[i]
        a = a[1:]
    if any(a):
        raise ArithmeticError("nonzero remainder")
    return q or [0]


def _divides(a: list, b: list) -> bool:
    """True when integer polynomial ``b`` (monic) divides ``a``."""
    try:
        _exact_div(a, b)
        return True
    except ArithmeticError:
        return False


def integer_primitive(p: MonicPolynomial) -> list:
    """Clear denominators of an exact monic polynomial; returns a primitive integer list."""
    if not p.is_exact:
        raise InputError("exact coefficients required")
    den = 1
    for c in p.coefficients:
        if isinstance(c, Fraction):
            den = den * c.denominator // math.gcd(den, c.denominator)
    return _primitive([int(c * den) for c in p.coefficients])


def squarefree_decomposition(p: MonicPolynomial) -> list:
    """Split an exact polynomial as ``prod(f_i ** i)`` with square-free, coprime ``f_i``.

    Returns ``[(f, i), ...]`` with each ``f`` a primitive integer coefficient
    list of positive degree.
    """
    f = integer_primitive(p)
    if len(f) == 1:
        return []
    g = _gcd(f, _derivative(f))
    h = _exact_div(f, g)
    out = []
    i = 1
    while len(h) > 1:
        h2 = _gcd(g, h)
        factor = _exact_div(h, h2)
        if len(factor) > 1:
            out.append((_primitive(factor), i))
        g = _exact_div(g, h2)
        h = h2
        i += 1
    return out


@lru_cache(maxsize=None)
def cyclotomic(k: int) -> tuple:
    """Integer coefficients of the k-th cyclotomic polynomial, descending."""
    if k < 1:
        raise InputError("cyclotomic index must be positive")
    num = [1] + [0] * (k - 1) + [-1]
    for d in range(1, k):
        if k % d == 0:
            num = _exact_div(num, list(cyclotomic(d)))
    return tuple(num)


def _euler_phi(k: int) -> int:
    return sum(1 for j in range(1, k + 1) if math.gcd(j, k) == 1)


def strip_cyclotomic_factors(f: list) -> tuple:
    """Divide out every cyclotomic factor of integer polynomial ``f``.

    Returns ``(rest, found)`` where ``found`` maps index ``k`` to the
    multiplicity of the k-th cyclotomic polynomial.
    """
    found = {}
    f = _primitive(f)
    k = 1
    # phi(k) >= sqrt(k/2), so indices past 2*deg**2 cannot divide
    while len(f) > 1 and k <= 2 * (len(f) - 1) ** 2:
        phi = _euler_phi(k)
        if phi <= len(f) - 1:
            c = list(cyclotomic(k))
            while len(f) - 1 >= phi and _divides(f, c):
                f = _exact_div(f, c)
                found[k] = found.get(k, 0) + 1
        k += 1
    return f, found


# ---------------------------------------------------------------------------
# roots


def _companion_roots(coeffs: np.ndarray, label: str) -> np.ndarray:
    """Eigenvalues of the balanced companion matrix of a monic float polynomial."""
    n = len(coeffs) - 1
    if n == 0:
        return np.array([], dtype=complex)
    if n == 1:
        return np.array([-coeffs[1]], dtype=complex)
    comp = np.zeros((n, n))
    comp[0, :] = -coeffs[1:]
    comp[np.arange(1, n), np.arange(0, n - 1)] = 1.0
    try:
        balanced, _ = scipy.linalg.matrix_balance(comp, permute=True, scale=True)
        vals = scipy.linalg.eigvals(balanced)
    except (np.linalg.LinAlgError, ValueError) as exc:
        raise NumericalError(f"eigenvalue solver failed on factor {label}: {exc}") from exc
    if not np.all(np.isfinite(vals)):
        raise NumericalError(f"eigenvalue solver returned non-finite roots for factor {label}")
    return vals.astype(complex)


def _newton_size(coeffs: np.ndarray, r: complex) -> float:
    val = np.polyval(coeffs, r)
    der = np.polyval(np.polyder(coeffs), r)
    if der == 0:
        return float("inf") if val != 0 else 0.0
    return float(abs(val / der))


def _monic_float(f: list) -> np.ndarray:
    lead = f[0]
    return np.array([float(Fraction(c, lead)) for c in f])


def _merge_clusters(vals: np.ndarray, coeffs: np.ndarray) -> list:
    """Collapse root clusters that look like one perturbed multiple root.

    A k-fold root under a coefficient perturbation of relative size u
    splits into a ring of radius about ``(u * |p|)**(1/k)``, while the
    centroid stays accurate to O(u). Groups are formed by single linkage
    from coarse to fine; a group whose radius is within ten times that
    scale is replaced by (centroid, k).
    """
    scale = np.finfo(float).eps * float(np.sum(np.abs(coeffs)))

    def mergeable(group):
        mid = sum(group) / len(group)
        radius = max(abs(v - mid) for v in group)
        return radius <= 10.0 * scale ** (1.0 / len(group)) * max(1.0, abs(mid))

    def components(group, link):
        comps = []
        for v in group:
            touching = [c for c in comps if any(abs(v - u) <= link for u in c)]
            merged = [v]
            for c in touching:
                comps.remove(c)
                merged += c
            comps.append(merged)
        return comps

    def split(group, link):
        if len(group) == 1 or mergeable(group):
            return [(sum(group) / len(group), len(group))]
        if link < 1e-15:
            return [(v, 1) for v in group]
        out = []
        for comp in components(group, link / 10):
            out += split(comp, link / 10)
        return out

    out = []
    for comp in components([complex(v) for v in vals], 0.1):
        out += split(comp, 0.1)
    return out


def roots(p: MonicPolynomial, strip_cyclotomic: bool = False) -> RootMultiset:
    """All complex roots of ``p`` with multiplicity.

    Exact inputs go through square-free decomposition first; with
    ``strip_cyclotomic`` the roots of unity are also removed exactly and
    reported at their exact positions on the circle.
    """
    if p.degree == 0:
        return RootMultiset(())
    entries = []
    tol = 0.0
    if not p.is_exact:
        coeffs = p.float_coefficients()
        vals = _companion_roots(coeffs, str(p))
        for r in vals:
            tol = max(tol, _newton_size(coeffs, r))
        for centre, k in _merge_clusters(vals, coeffs):
            entries.append((centre, k))
        return RootMultiset(tuple(entries), tol)

    for factor, mult in squarefree_decomposition(p):
        if strip_cyclotomic:
            factor, found = strip_cyclotomic_factors(factor)
            for k, cm in sorted(found.items()):
                for j in range(1, k + 1):
                    if math.gcd(j, k) == 1:
                        entries.append((complex(np.exp(2j * np.pi * j / k)), cm * mult))
        if len(factor) > 1:
            coeffs = _monic_float(factor)
            for r in _companion_roots(coeffs, " ".join(map(str, factor))):
                tol = max(tol, _newton_size(coeffs, r))
                entries.append((complex(r), mult))
    result = RootMultiset(tuple(entries), tol)
    if result.degree != p.degree:
        raise NumericalError(f"root count {result.degree} does not match degree {p.degree}")
    return result


# ---------------------------------------------------------------------------
# invariants


def _log_radii(p: MonicPolynomial, strip_cyclotomic: bool) -> tuple:
    if p.degree < 1:
        raise InputError("degree must be at least 1")
    rs = roots(p, strip_cyclotomic=strip_cyclotomic)
    mods = np.abs(rs.distinct())
    mult = rs.multiplicities()
    lr = np.where(np.abs(mods - 1.0) <= UNIMODULAR_SNAP, 0.0, np.log(np.maximum(mods, 1.0)))
    return lr, mult


def mahler_log(p: MonicPolynomial, strip_cyclotomic: bool = False) -> float:
    """Logarithmic Mahler measure, ``sum log max(1, |root|)`` over roots with multiplicity."""
    lr, mult = _log_radii(p, strip_cyclotomic)
    return float(np.sum(mult * lr))


def jensen_square_sum(p: MonicPolynomial, strip_cyclotomic: bool = False) -> float:
    """``sum log(max(1, |root|))**2`` over roots with multiplicity."""
    lr, mult = _log_radii(p, strip_cyclotomic)
    return float(np.sum(mult * lr * lr))


def log_house(p: MonicPolynomial, strip_cyclotomic: bool = False) -> float:
    lr, _ = _log_radii(p, strip_cyclotomic)
    return float(np.max(lr)) if lr.size else 0.0


def invariants(p: MonicPolynomial, strip_cyclotomic: bool = False) -> tuple:
    """``(m, w, h)`` from a single root computation."""
    lr, mult = _log_radii(p, strip_cyclotomic)
    return (float(np.sum(mult * lr)), float(np.sum(mult * lr * lr)),
            float(np.max(lr)) if lr.size else 0.0)


def reciprocity_sign(p: MonicPolynomial) -> int:
    """+1 if ``z**d p(1/z) == p``, -1 if it equals ``-p``, 0 otherwise."""
    if not p.is_exact:
        raise InputError("reciprocity is only decided for exact coefficients")
    c = p.coefficients
    rev = c[::-1]
    if rev == c:
        return 1
    if tuple(-x for x in rev) == c:
        return -1
    return 0


def is_reciprocal(p: MonicPolynomial) -> bool:
    return reciprocity_sign(p) != 0


def mahler_log_quadrature(p: MonicPolynomial, tol: float = 1e-9, order: int = 15) -> float:
    """Circle average of ``log|p|`` by adaptive composite Gauss-Legendre.

    Refuses polynomials with a root within ``sqrt(tol)`` of the unit circle:
    the integrand is log-singular there and the Jensen root sum is the
    reliable route.
    """
    if tol <= 0:
        raise InputError("tolerance must be positive")
    if p.degree < 1:
        raise InputError("degree must be at least 1")
    near = np.abs(np.abs(roots(p).distinct()) - 1.0)
    if near.size and near.min() < math.sqrt(tol):
        raise NumericalError(
            f"root within {near.min():.3g} of the unit circle; quadrature is unreliable, use mahler_log"
        )
    coeffs = p.float_coefficients()
    nodes, weights = np.polynomial.legendre.leggauss(order)

    def panel(a, b):
        mid, half = 0.5 * (a + b), 0.5 * (b - a)
        theta = mid + half * nodes
        vals = np.log(np.abs(np.polyval(coeffs, np.exp(1j * theta))))
        return half * float(np.dot(weights, vals))

    total = 0.0
    used = 0
    two_pi = 2.0 * math.pi
    stack = [(k * two_pi / 8, (k + 1) * two_pi / 8, None) for k in range(8)]
    while stack:
        a, b, whole = stack.pop()
        if whole is None:
            whole = panel(a, b)
            used += order
        mid = 0.5 * (a + b)
        left, right = panel(a, mid), panel(mid, b)
        used += 2 * order
        if used > QUADRATURE_MAX_NODES:
            raise NumericalError(f"quadrature exceeded {QUADRATURE_MAX_NODES} nodes")
        if abs(left + right - whole) <= tol * (b - a):
            total += left + right
        else:
            stack.append((a, mid, left))
            stack.append((mid, b, right))
    return total / two_pi
