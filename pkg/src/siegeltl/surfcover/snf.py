"""Exact Smith normal form over the integers with unimodular transforms."""

from __future__ import annotations

from dataclasses import dataclass


@dataclass(frozen=True)
class SmithForm:
    """``U @ A @ V = diag(invariants)`` padded with zeros; ``V_inv`` is the exact inverse of ``V``."""

    invariants: tuple
    U: list
    V: list
    V_inv: list

    @property
    def rank(self) -> int:
        return len(self.invariants)


def _identity(n):
    return [[int(i == j) for j in range(n)] for i in range(n)]


def smith_normal_form(A) -> SmithForm:
    A = [[int(x) for x in row] for row in A]
    m = len(A)
    n = len(A[0]) if m else 0
    U, V, Vi = _identity(m), _identity(n), _identity(n)

    def swap_rows(i, j):
        A[i], A[j] = A[j], A[i]
        U[i], U[j] = U[j], U[i]

    def swap_cols(i, j):
        for row in A:
            row[i], row[j] = row[j], row[i]
        for row in V:
            row[i], row[j] = row[j], row[i]
        Vi[i], Vi[j] = Vi[j], Vi[i]

    def add_row(src, dst, q):
        # row dst += q * row src
        if q:
            A[dst] = [a + q * b for a, b in zip(A[dst], A[src])]
            U[dst] = [a + q * b for a, b in zip(U[dst], U[src])]

    def add_col(src, dst, q):
        # col dst += q * col src; the inverse update is row src -= q * row dst
        if q:
            for row in A:
                if row[src]:
                    row[dst] += q * row[src]
            for row in V:
                if row[src]:
                    row[dst] += q * row[src]
            Vi[src] = [a - q * b for a, b in zip(Vi[src], Vi[dst])]

    def negate_row(i):
        A[i] = [-a for a in A[i]]
        U[i] = [-a for a in U[i]]

    invariants = []
    t = 0
    while t < min(m, n):
        best = None
        for i in range(t, m):
            row = A[i]
            for j in range(t, n):
                v = row[j]
                if v and (best is None or abs(v) < best[0]):
                    best = (abs(v), i, j)
                    if best[0] == 1:
                        break
            if best is not None and best[0] == 1:
                break
        if best is None:
            break
        _, i, j = best
        swap_rows(t, i)
        swap_cols(t, j)
        while True:
            p = A[t][t]
            done = True
            for i in range(t + 1, m):
                if A[i][t]:
                    add_row(t, i, -(A[i][t] // p))
                    if A[i][t]:
                        done = False
            for j in range(t + 1, n):
                if A[t][j]:
                    add_col(t, j, -(A[t][j] // p))
                    if A[t][j]:
                        done = False
            if done:
                # divisibility of the remaining block by the pivot
                bad = next(((i, j) for i in range(t + 1, m) for j in range(t + 1, n)
                            if A[i][j] % p), None)
                if bad is None:
                    break
                add_row(bad[0], t, 1)
                continue
            # a smaller remainder exists; move it to the pivot position
            cands = [(abs(A[i][t]), i, t) for i in range(t + 1, m) if A[i][t]]
            cands += [(abs(A[t][j]), t, j) for j in range(t + 1, n) if A[t][j]]
            _, i, j = min(cands)
            swap_rows(t, i)
            swap_cols(t, j)
        if A[t][t] < 0:
            negate_row(t)
        invariants.append(A[t][t])
        t += 1
    return SmithForm(tuple(invariants), U, V, Vi)
