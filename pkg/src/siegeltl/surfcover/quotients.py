"""Finite quotients of pi_1(S) given by permutation actions on cosets."""

from __future__ import annotations

import itertools
import re
from collections import deque
from dataclasses import dataclass
from functools import cached_property

from ..errors import CapExceededError, InputError, ValidationError
from .words import MAX_GENUS, SurfacePresentation, Word

MAX_DEGREE = 4096
MOD_K = "mod-k-homology"
USER = "user-supplied"


@dataclass(frozen=True, eq=False)
class FiniteQuotient:
    """Right action of pi_1 on ``{0..n-1}``: point ``c`` goes to ``perms[k-1][c]`` under generator ``k``.

    ``characteristic`` records that every automorphism preserves the kernel
    (true for mod-k homology quotients).
    """

    presentation: SurfacePresentation
    perms: tuple
    kind: str
    modulus: int | None = None
    characteristic: bool = False

    @property
    def degree(self) -> int:
        return len(self.perms[0])

    def label(self) -> str:
        if self.kind == MOD_K:
            return f"mod{self.modulus}"
        return f"deg{self.degree}"

    @cached_property
    def _inverse(self) -> tuple:
        out = []
        for p in self.perms:
            inv = [0] * len(p)
            for i, j in enumerate(p):
                inv[j] = i
            out.append(tuple(inv))
        return tuple(out)

    def inverse_perms(self) -> tuple:
        return self._inverse

    def act(self, c: int, w: Word) -> int:
        inv = self.inverse_perms()
        for x in w:
            c = self.perms[x - 1][c] if x > 0 else inv[-x - 1][c]
        return c

    def word_permutation(self, w: Word) -> tuple:
        inv = self.inverse_perms()
        out = []
        for c in range(self.degree):
            for x in w:
                c = self.perms[x - 1][c] if x > 0 else inv[-x - 1][c]
            out.append(c)
        return tuple(out)

    def element_point(self, q) -> int:
        """Image of point 0 under the group element ``q``.

        ``q`` may be a Word, a vector in (Z/k)^{2g} for mod-k quotients, or a
        permutation in one-line notation (0-based) that must lie in the group.
        """
        n = self.degree
        if isinstance(q, Word):
            return self.act(0, q)
        q = tuple(int(v) for v in q)
        if self.kind == MOD_K and len(q) == self.presentation.rank:
            return _mixed_index([v % self.modulus for v in q], self.modulus)
        if len(q) == n and sorted(q) == list(range(n)):
            c = q[0]
            # in a regular action an element is pinned down by the image of 0
            from .cover import schreier_transversal
            if self.word_permutation(schreier_transversal(self)[c]) != q:
                raise InputError("permutation is not an element of the quotient group")
            return c
        raise InputError(f"cannot interpret {q!r} as an element of the quotient group")


def _mixed_index(vec, k: int) -> int:
    idx = 0
    for v in vec:
        idx = idx * k + v
    return idx


def _check_degree(n: int, max_degree: int):
    if n > max_degree:
        raise CapExceededError(f"cover degree {n} exceeds the cap {max_degree}; use a smaller k or genus")


def mod_k_cover(pres: SurfacePresentation, k: int, max_degree: int = MAX_DEGREE) -> FiniteQuotient:
    """pi_1 -> H_1(S; Z/k) acting on itself by translation."""
    if k < 2:
        raise InputError(f"modulus must be at least 2, got {k}")
    r = pres.rank
    n = k ** r
    _check_degree(n, max_degree)
    vectors = list(itertools.product(range(k), repeat=r))
    perms = []
    for j in range(r):
        stride = k ** (r - 1 - j)
        perms.append(tuple(i + stride * ((v[j] + 1) % k - v[j]) for i, v in enumerate(vectors)))
    return FiniteQuotient(pres, tuple(perms), MOD_K, modulus=k, characteristic=True)


def _generated_group_order(perms, cap: int) -> int:
    """BFS over the group generated by ``perms``; stops once more than ``cap`` elements are seen."""
    ident = tuple(range(len(perms[0])))
    seen = {ident}
    queue = deque([ident])
    while queue:
        g = queue.popleft()
        for p in perms:
            h = tuple(p[i] for i in g)
            if h not in seen:
                seen.add(h)
                if len(seen) > cap:
                    return len(seen)
                queue.append(h)
    return len(seen)


def validate_quotient(pres: SurfacePresentation, perms, kind: str = USER,
                      max_degree: int = MAX_DEGREE) -> FiniteQuotient:
    perms = tuple(tuple(int(v) for v in p) for p in perms)
    if len(perms) != pres.rank:
        raise InputError(f"expected {pres.rank} permutations, got {len(perms)}")
    n = len(perms[0])
    _check_degree(n, max_degree)
    for p in perms:
        if len(p) != n or sorted(p) != list(range(n)):
            raise InputError("each generator needs a permutation of the same n points")
    q = FiniteQuotient(pres, perms, kind)
    if q.word_permutation(pres.relator) != tuple(range(n)):
        raise ValidationError("relator does not act trivially; not a quotient of the surface group")
    seen, queue = {0}, deque([0])
    while queue:
        c = queue.popleft()
        for p in perms:
            for d in (p[c], p.index(c)):
                if d not in seen:
                    seen.add(d)
                    queue.append(d)
    if len(seen) != n:
        raise ValidationError("action is not transitive")
    # transitive with all point stabilizers equal <=> the permutation group has order n
    if _generated_group_order(perms, n) != n:
        raise ValidationError("point stabilizers differ: the cover is not regular")
    return q


def parse_quotient(text: str, pres: SurfacePresentation, max_degree: int = MAX_DEGREE) -> FiniteQuotient:
    """``modk <k>``, or ``degree n`` followed by one 1-based one-line permutation per generator."""
    rows = [(i, ln.split("#", 1)[0].strip()) for i, ln in enumerate(text.splitlines(), 1)]
    rows = [(i, ln) for i, ln in rows if ln]
    if not rows:
        raise InputError("empty quotient file")
    lineno, first = rows[0]
    m = re.fullmatch(r"modk\s+(\d+)", first)
    if m:
        if len(rows) > 1:
            raise InputError("unexpected content after 'modk'", rows[1][0], 1)
        return mod_k_cover(pres, int(m.group(1)), max_degree)
    m = re.fullmatch(r"degree\s+(\d+)", first)
    if not m:
        raise InputError("first line must be 'degree n' or 'modk k'", lineno, 1)
    n = int(m.group(1))
    _check_degree(n, max_degree)
    perms = []
    for lineno, ln in rows[1:]:
        try:
            vals = [int(t) - 1 for t in ln.split()]
        except ValueError:
            raise InputError(f"non-integer entry in {ln!r}", lineno, 1) from None
        if len(vals) != n or sorted(vals) != list(range(n)):
            raise InputError(f"not a permutation of 1..{n}", lineno, 1)
        perms.append(vals)
    return validate_quotient(pres, perms, USER, max_degree)


def parse_quotient_list(text: str, pres: SurfacePresentation, max_degree: int = MAX_DEGREE) -> list:
    """Several quotient blocks in one file; each block starts with ``modk`` or ``degree``."""
    blocks, cur = [], []
    for ln in text.splitlines():
        body = ln.split("#", 1)[0].strip()
        if body.startswith(("modk", "degree")) and cur:
            blocks.append(cur)
            cur = []
        cur.append(ln)
    if cur:
        blocks.append(cur)
    return [parse_quotient("\n".join(b), pres, max_degree) for b in blocks if "".join(b).strip()]


def trivial_quotient(pres: SurfacePresentation) -> FiniteQuotient:
    return validate_quotient(pres, [(0,)] * pres.rank)


__all__ = ["FiniteQuotient", "MAX_DEGREE", "MAX_GENUS", "MOD_K", "USER", "mod_k_cover",
           "parse_quotient", "parse_quotient_list", "trivial_quotient", "validate_quotient"]
