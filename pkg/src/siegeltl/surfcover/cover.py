"""Reidemeister-Schreier for regular covers and lifted homology actions."""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass
from functools import cached_property

import numpy as np

from ..errors import LiftError, NumericalError
from ..polyinv import MonicPolynomial
from ..symplinalg import char_poly
from .quotients import FiniteQuotient
from .snf import SmithForm, smith_normal_form
from .words import SurfaceAutomorphism, Word, homology_action, letter_counts

IDENTITY_COSET = "identity-coset"

_TRANSVERSALS: dict = {}


def _letter_order(rank: int) -> list:
    # lexicographic edge order: generator index first, positive letter before its inverse
    return [s * k for k in range(1, rank + 1) for s in (1, -1)]


def _bfs(quotient: FiniteQuotient):
    inv = quotient.inverse_perms()
    n = quotient.degree
    trans = [None] * n
    parent = [None] * n
    trans[0] = Word()
    queue = deque([0])
    while queue:
        c = queue.popleft()
        for x in _letter_order(quotient.presentation.rank):
            d = quotient.perms[x - 1][c] if x > 0 else inv[-x - 1][c]
            if trans[d] is None:
                trans[d] = trans[c] * Word([x])
                parent[d] = (c, x)
                queue.append(d)
    return trans, parent


def schreier_transversal(quotient: FiniteQuotient) -> list:
    key = id(quotient)
    if key not in _TRANSVERSALS or _TRANSVERSALS[key][0] is not quotient:
        _TRANSVERSALS[key] = (quotient, _bfs(quotient)[0])
    return _TRANSVERSALS[key][1]


@dataclass(eq=False)
class CoverData:
    """Schreier data and an integral basis of H_1 of the cover.

    Schreier generator ``j`` is ``t_c x t_d^-1`` for the non-tree edge
    ``edges[j] = (c, x)``. Homology is ``Z^N / rowspan(relations)``; with
    ``U R V = D`` of rank ``r`` the classes of ``rows r: of V^-1`` form a
    basis and ``v -> (v V)[r:]`` gives coordinates.
    """

    quotient: FiniteQuotient
    transversal: list
    edges: list
    edge_index: dict
    relations: list
    smith: SmithForm

    @property
    def degree(self) -> int:
        return self.quotient.degree

    @property
    def n_generators(self) -> int:
        return len(self.edges)

    @property
    def rank(self) -> int:
        return self.smith.rank

    @property
    def homology_rank(self) -> int:
        return self.n_generators - self.rank

    @property
    def genus(self) -> int:
        return self.homology_rank // 2

    def schreier_generator(self, j: int) -> Word:
        c, x = self.edges[j]
        d = self.quotient.perms[x - 1][c]
        return self.transversal[c] * Word([x]) * self.transversal[d].inverse()

    def rewrite(self, w: Word, start: int = 0):
        """Abelianized Schreier rewrite of ``w`` read from coset ``start``; returns (vector, end coset)."""
        perms = self.quotient.perms
        inv = self._inv
        vec = [0] * self.n_generators
        c = start
        for x in w:
            if x > 0:
                j = self.edge_index.get((c, x))
                if j is not None:
                    vec[j] += 1
                c = perms[x - 1][c]
            else:
                c = inv[-x - 1][c]
                j = self.edge_index.get((c, -x))
                if j is not None:
                    vec[j] -= 1
        return vec, c

    @cached_property
    def _inv(self):
        return self.quotient.inverse_perms()

    @cached_property
    def projection(self) -> np.ndarray:
        """``N x 2g'`` integer matrix: Schreier coordinates to homology coordinates."""
        r = self.rank
        return np.array([row[r:] for row in self.smith.V], dtype=object).reshape(self.n_generators, -1)

    @cached_property
    def section(self) -> np.ndarray:
        """``2g' x N``: Schreier vectors representing the homology basis."""
        return np.array(self.smith.V_inv[self.rank:], dtype=object).reshape(-1, self.n_generators)

    def to_homology(self, rows) -> np.ndarray:
        return _int_matmul(np.array(rows, dtype=object).reshape(-1, self.n_generators), self.projection)

    @cached_property
    def pushforward(self) -> np.ndarray:
        """``2g x 2g'`` matrix of the covering projection on H_1 (column convention)."""
        rk = self.quotient.presentation.rank
        counts = np.array([letter_counts(self.schreier_generator(j), rk) for j in range(self.n_generators)],
                          dtype=object).reshape(self.n_generators, rk)
        return _int_matmul(self.section, counts).T


def _int_matmul(A, B) -> np.ndarray:
    return np.asarray(A, dtype=object).dot(np.asarray(B, dtype=object))


def build_cover(quotient: FiniteQuotient) -> CoverData:
    pres = quotient.presentation
    n = quotient.degree
    trans, parent = _bfs(quotient)
    _TRANSVERSALS[id(quotient)] = (quotient, trans)
    tree = set()
    for d in range(1, n):
        c, x = parent[d]
        tree.add((c, x) if x > 0 else (d, -x))
    edges = [(c, x) for c in range(n) for x in range(1, pres.rank + 1) if (c, x) not in tree]
    expected = n * (pres.rank - 1) + 1
    if len(edges) != expected:
        raise NumericalError(f"internal: {len(edges)} Schreier generators, expected {expected}")
    cover = CoverData(quotient, trans, edges, {e: j for j, e in enumerate(edges)}, [], None)
    relations = []
    for c in range(n):
        vec, end = cover.rewrite(pres.relator, c)
        if end != c:
            raise NumericalError("internal: relator does not close up in the coset table")
        relations.append(vec)
    cover.relations = relations
    cover.smith = smith_normal_form(relations)
    if cover.rank != n - 1:
        raise NumericalError(f"internal: relation rank {cover.rank}, expected {n - 1}")
    if any(d != 1 for d in cover.smith.invariants):
        raise NumericalError(f"internal: torsion in cover homology, invariants {cover.smith.invariants}")
    if cover.homology_rank != n * (pres.rank - 2) + 2:
        raise NumericalError("internal: cover homology rank violates Riemann-Hurwitz")
    return cover


@dataclass(eq=False)
class LiftedAction:
    cover: CoverData
    matrix: np.ndarray
    convention: str = IDENTITY_COSET

    @cached_property
    def char_poly(self) -> MonicPolynomial:
        return char_poly(self.matrix)

    @property
    def determinant(self) -> int:
        P = self.char_poly
        c0 = P.coefficients[-1]
        return int(c0) * (-1) ** P.degree


def _homology_matrix(cover: CoverData, images) -> np.ndarray:
    """Column-convention matrix of the map sending Schreier generator ``j`` to word ``images[j]`` read from coset 0."""
    F = [cover.rewrite(w, 0)[0] for w in images]
    rows = _int_matmul(cover.section, np.array(F, dtype=object).reshape(cover.n_generators, -1))
    return _int_matmul(rows, cover.projection).T.copy()


def lift_action(cover: CoverData, auto: SurfaceAutomorphism) -> LiftedAction:
    """Lift fixing the identity coset, acting on H_1 of the cover."""
    q = cover.quotient
    if auto.presentation != q.presentation:
        raise LiftError("automorphism and cover live on different surfaces")
    images = [auto(cover.schreier_generator(j)) for j in range(cover.n_generators)]
    # the action is regular, so fixing coset 0 means acting as the identity permutation
    if any(q.act(0, w) != 0 for w in images):
        raise LiftError(f"automorphism does not preserve the cover {q.label()}")
    return LiftedAction(cover, _homology_matrix(cover, images))


def deck_action(cover: CoverData, q) -> np.ndarray:
    """Homology matrix of the deck transformation given by conjugation with ``t_q``."""
    c = cover.quotient.element_point(q)
    h = cover.transversal[c]
    images = [h * cover.schreier_generator(j) * h.inverse() for j in range(cover.n_generators)]
    return _homology_matrix(cover, images)


def restriction_check(cover: CoverData, lifted: LiftedAction, auto: SurfaceAutomorphism) -> bool:
    """Covering projection intertwines the lift with the base action: ``pi L = f_* pi``."""
    P = cover.pushforward
    return bool(np.array_equal(_int_matmul(P, lifted.matrix), _int_matmul(homology_action(auto), P)))
