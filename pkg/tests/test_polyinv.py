import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from siegeltl.errors import InputError, NumericalError
from siegeltl.polyinv import (
    EXACT_INTEGER,
    EXACT_RATIONAL,
    FLOATING,
    MonicPolynomial,
    cyclotomic,
    invariants,
    is_reciprocal,
    jensen_square_sum,
    log_house,
    mahler_log,
    mahler_log_quadrature,
    parse_polynomial,
    reciprocity_sign,
    roots,
    squarefree_decomposition,
    strip_cyclotomic_factors,
)

LEHMER = MonicPolynomial((1, 1, 0, -1, -1, -1, -1, -1, 0, 1, 1))


def _eval_exact(coeffs, x):
    acc = Fraction(0)
    for c in coeffs:
        acc = acc * x + c
    return acc


def bisect_root(coeffs, lo, hi, steps=200):
    """Exact-rational bisection; independent of any eigenvalue solver."""
    lo, hi = Fraction(lo), Fraction(hi)
    flo = _eval_exact(coeffs, lo)
    assert flo * _eval_exact(coeffs, hi) < 0
    for _ in range(steps):
        mid = (lo + hi) / 2
        fm = _eval_exact(coeffs, mid)
        if (fm < 0) == (flo < 0):
            lo, flo = mid, fm
        else:
            hi = mid
        # keep the fractions small
        lo = Fraction(lo).limit_denominator(10**40)
        hi = Fraction(hi).limit_denominator(10**40)
    return float((lo + hi) / 2)


@pytest.fixture(scope="module")
def lehmer_root():
    return bisect_root(LEHMER.coefficients, 1, 2)


def test_kind_inference():
    assert MonicPolynomial((1, -2)).kind == EXACT_INTEGER
    assert MonicPolynomial((1, Fraction(1, 4))).kind == EXACT_RATIONAL
    assert MonicPolynomial((1.0, 0.5)).kind == FLOATING


def test_rejects_non_monic():
    with pytest.raises(InputError):
        MonicPolynomial((2, 1))


def test_parse_formats():
    assert parse_polynomial("1 -2").coefficients == (1, -2)
    assert parse_polynomial("1 1/4 1/16").kind == EXACT_RATIONAL
    assert parse_polynomial("1 0.5").kind == FLOATING
    with pytest.raises(InputError) as exc:
        parse_polynomial("1 x")
    assert "column 3" in str(exc.value)


def test_linear_root():
    r = roots(MonicPolynomial((1, -2)))
    assert r.degree == 1
    assert r.values()[0] == pytest.approx(2)


def test_repeated_root_collapses():
    p = MonicPolynomial.from_roots([1] * 34)
    assert squarefree_decomposition(p) == [([1, -1], 34)]
    r = roots(p)
    assert len(r.entries) == 1 and r.entries[0][1] == 34
    assert jensen_square_sum(p) == 0.0


def test_lehmer_against_bisection(lehmer_root):
    assert lehmer_root == pytest.approx(1.17628082, abs=1e-8)
    assert np.max(np.abs(roots(LEHMER).values())) == pytest.approx(lehmer_root, rel=1e-12)
    assert mahler_log(LEHMER) == pytest.approx(math.log(lehmer_root), abs=1e-12)
    assert jensen_square_sum(LEHMER) == pytest.approx(math.log(lehmer_root) ** 2, abs=1e-12)
    assert abs(jensen_square_sum(LEHMER) - 0.0263600) < 1e-6


@pytest.mark.parametrize("coeffs,m,w,h", [
    ((1, -2), math.log(2), math.log(2) ** 2, math.log(2)),
    ((1, 0, 0, 0, -1), 0.0, 0.0, 0.0),
    ((1, -5, 6), math.log(6), math.log(2) ** 2 + math.log(3) ** 2, math.log(3)),
])
def test_invariant_table(coeffs, m, w, h):
    p = MonicPolynomial(coeffs)
    assert mahler_log(p) == pytest.approx(m, abs=1e-12)
    assert jensen_square_sum(p) == pytest.approx(w, abs=1e-12)
    assert log_house(p) == pytest.approx(h, abs=1e-12)


def test_reciprocity():
    assert is_reciprocal(MonicPolynomial((1, -3, 1)))
    assert not is_reciprocal(MonicPolynomial((1, -2)))
    assert is_reciprocal(LEHMER)
    assert reciprocity_sign(MonicPolynomial((1, 0, 0, 0, -1))) == -1
    with pytest.raises(InputError):
        is_reciprocal(MonicPolynomial((1.0, -2.0)))


@pytest.mark.parametrize("coeffs,expected", [
    ((1, -2), math.log(2)),
    ((1, -5, 6), math.log(6)),
    ((1, Fraction(1, 4), Fraction(1, 16)), 0.0),
])
def test_quadrature_examples(coeffs, expected):
    assert mahler_log_quadrature(MonicPolynomial(coeffs)) == pytest.approx(expected, abs=1e-9)


def test_quadrature_refuses_circle_roots():
    with pytest.raises(NumericalError):
        mahler_log_quadrature(MonicPolynomial((1, 0, 0, 0, -1)))


def test_cyclotomic_stripping():
    phi12 = MonicPolynomial(cyclotomic(12))
    p = phi12 * MonicPolynomial((1, -3, 1))
    rest, stripped = strip_cyclotomic_factors(list(p.coefficients))
    assert list(rest) == [1, -3, 1]
    assert 12 in stripped
    assert jensen_square_sum(p, strip_cyclotomic=True) == pytest.approx(jensen_square_sum(p), abs=1e-12)


def test_snap_rule():
    # a root 1e-12 outside the circle contributes nothing
    p = MonicPolynomial.from_roots([1.0 + 1e-12, 3.0])
    assert mahler_log(p) == pytest.approx(math.log(3), abs=1e-12)


roots_strategy = st.lists(st.integers(-5, 5).filter(lambda v: v != 0), min_size=1, max_size=6)


@settings(max_examples=40, deadline=None)
@given(roots_strategy)
def test_integer_roots_property(rs):
    p = MonicPolynomial.from_roots(rs)
    m, w, h = invariants(p)
    logs = [math.log(max(1, abs(r))) for r in rs]
    assert m == pytest.approx(sum(logs), abs=1e-9)
    assert w == pytest.approx(sum(v * v for v in logs), abs=1e-9)
    assert h == pytest.approx(max(logs), abs=1e-9)
    # Cauchy-Schwarz between m and w
    assert m <= math.sqrt(w * p.degree) + 1e-12


@settings(max_examples=25, deadline=None)
@given(roots_strategy, roots_strategy)
def test_additivity(r1, r2):
    p, q = MonicPolynomial.from_roots(r1), MonicPolynomial.from_roots(r2)
    assert jensen_square_sum(p * q) == pytest.approx(jensen_square_sum(p) + jensen_square_sum(q), abs=1e-9)
    assert mahler_log(p * q) == pytest.approx(mahler_log(p) + mahler_log(q), abs=1e-9)


def test_float_multiple_root_is_merged():
    p = MonicPolynomial(tuple(float(c) for c in MonicPolynomial.from_roots([1] * 4).coefficients))
    r = roots(p)
    assert [k for _, k in r.entries] == [4]
    assert abs(r.entries[0][0] - 1) < 1e-12
    assert jensen_square_sum(p) == 0.0


def test_float_close_distinct_roots_stay_apart():
    p = MonicPolynomial.from_roots([2.0, 2.001, 0.5])
    assert sorted(k for _, k in roots(p).entries) == [1, 1, 1]
