import itertools
import math

import numpy as np
import pytest
import sympy
from sympy.matrices.normalforms import smith_normal_form as sympy_snf

from siegeltl.errors import CapExceededError, InputError, LiftError, ValidationError
from siegeltl.polyinv import MonicPolynomial, is_reciprocal, jensen_square_sum, log_house
from siegeltl.symplinalg import char_poly
from siegeltl.surfcover import (
    Word,
    build_cover,
    deck_action,
    growth_table,
    homology_action,
    identity_automorphism,
    lift_action,
    mod_k_cover,
    parse_automorphism,
    parse_quotient,
    pseudo_anosov,
    restriction_check,
    smith_normal_form,
    surface_presentation,
    table_csv,
    transvection,
    trivial_quotient,
    twist,
    twist_corpus,
    validate_automorphism,
    validate_quotient,
)
from siegeltl.surfcover.fixtures import CHAIN, read_fixture
from siegeltl.surfcover.words import format_automorphism

P2 = surface_presentation(2)
SWAP, FIX = (1, 0), (0, 1)


def images(*words):
    return [P2.parse_word(w) for w in words]


@pytest.fixture(scope="module")
def mod2():
    return build_cover(mod_k_cover(P2, 2))


@pytest.fixture(scope="module")
def deg2_a1():
    # generator order a1, a2, b1, b2
    return build_cover(validate_quotient(P2, [SWAP, FIX, FIX, FIX]))


@pytest.fixture(scope="module")
def deg2_b1():
    return build_cover(validate_quotient(P2, [FIX, FIX, SWAP, FIX]))


def s3_regular():
    elems = list(itertools.permutations(range(3)))
    index = {g: i for i, g in enumerate(elems)}

    def right_mult(h):
        # g -> g h, composing as functions on {0,1,2}
        return tuple(index[tuple(h[g[i]] for i in range(3))] for g in elems)

    x, y = (1, 0, 2), (0, 2, 1)
    return validate_quotient(P2, [right_mult(x), right_mult(y), right_mult(y), right_mult(x)])


def test_words_reduce():
    w = Word([1, 2, -2, -1, 3])
    assert tuple(w) == (3,)
    assert Word([1, -3]).inverse() == Word([3, -1])
    assert P2.format_word(P2.parse_word("a1 B2 b1")) == "a1 B2 b1"
    with pytest.raises(InputError):
        P2.parse_word("a3")


def test_presentation():
    assert P2.format_word(P2.relator) == "a1 b1 A1 B1 a2 b2 A2 B2"
    assert len(surface_presentation(3).relator) == 12
    assert P2.rank == 4
    with pytest.raises(InputError):
        surface_presentation(1)


def test_validate_examples():
    ident = identity_automorphism(P2)
    assert ident.conjugator == Word()
    tw = validate_automorphism(P2, images("a1", "a2", "b1 a1", "b2"))
    assert tw.sign == 1
    with pytest.raises(ValidationError, match="not a surface automorphism"):
        validate_automorphism(P2, images("a1 a1", "a2", "b1", "b2"))
    # a_i <-> b_{g+1-i} sends the relator to its inverse
    with pytest.raises(ValidationError, match="orientation-reversing"):
        validate_automorphism(P2, images("b2", "b1", "a2", "a1"))


def test_conjugator_witness_identity():
    for c in CHAIN:
        f = twist_corpus()[c][1]
        rel = P2.relator
        assert f(rel) == f.conjugator * rel * f.conjugator.inverse()


def test_homology_action():
    tw = validate_automorphism(P2, images("a1", "a2", "b1 a1", "b2"))
    M = homology_action(tw)
    want = np.eye(4, dtype=int)
    want[0, 2] = 1  # the b1 column gains an a1
    assert np.array_equal(M, want)
    f, g = twist("c2"), twist("c3")
    assert np.array_equal(homology_action(f.compose(g)), homology_action(f) @ homology_action(g))


def test_twist_corpus_matches_transvections():
    corpus = twist_corpus()
    assert list(corpus) == list(CHAIN)
    c3 = homology_action(corpus["c3"][1])
    assert np.array_equal(c3, transvection((0, 0, -1, 1), 2))


def test_pa_fixture():
    f = pseudo_anosov()
    P = char_poly(np.array(homology_action(f), dtype=object))
    assert P.coefficients == (1, -2, 1, -2, 1)
    assert log_house(P) > 0


def test_automorphism_file_roundtrip():
    f = pseudo_anosov()
    g = parse_automorphism(format_automorphism(f))
    assert g.images == f.images
    with pytest.raises(InputError, match="line 3"):
        parse_automorphism("genus 2\na1 -> a1\na2 -> x7\n")
    with pytest.raises(InputError, match="missing"):
        parse_automorphism("genus 2\na1 -> a1\n")
    with pytest.raises(ValidationError):
        parse_automorphism(read_fixture("twist_c2") + "conjugator a1\n")


def test_mod_k_degrees():
    assert mod_k_cover(P2, 2).degree == 16
    assert mod_k_cover(P2, 3).degree == 81
    with pytest.raises(CapExceededError):
        mod_k_cover(P2, 9)
    with pytest.raises(CapExceededError):
        mod_k_cover(P2, 3, max_degree=50)


def test_quotient_validation():
    with pytest.raises(ValidationError, match="transitive"):
        validate_quotient(P2, [FIX] * 4)
    s12, s23 = (1, 0, 2), (0, 2, 1)
    with pytest.raises(ValidationError, match="relator"):
        validate_quotient(P2, [s12, s12, s23, s23])
    with pytest.raises(ValidationError, match="regular"):
        validate_quotient(P2, [s12, s23, s23, s12])
    q = parse_quotient("degree 2\n2 1\n1 2\n1 2\n1 2\n", P2)
    assert q.degree == 2
    with pytest.raises(InputError, match="line 2"):
        parse_quotient("degree 2\n2 2\n1 2\n1 2\n1 2\n", P2)
    assert parse_quotient("modk 2", P2).degree == 16


@pytest.mark.parametrize("seed", range(6))
def test_snf_against_sympy(seed):
    rng = np.random.default_rng(seed)
    m, n = int(rng.integers(2, 7)), int(rng.integers(2, 7))
    A = rng.integers(-6, 7, size=(m, n))
    A[-1] = 2 * A[0]  # force some rank drop
    F = smith_normal_form(A.tolist())
    U, V, Vi = (np.array(X, dtype=object) for X in (F.U, F.V, F.V_inv))
    D = U.dot(np.array(A, dtype=object)).dot(V)
    diag = [D[i, i] for i in range(min(m, n))]
    assert all(D[i, j] == 0 for i in range(m) for j in range(n) if i != j)
    assert list(F.invariants) == [d for d in diag if d]
    assert (V.dot(Vi) == np.eye(n, dtype=int)).all()
    assert abs(sympy.Matrix(F.U).det()) == 1
    oracle = sympy_snf(sympy.Matrix(A.tolist()), domain=sympy.ZZ)
    want = [abs(int(oracle[i, i])) for i in range(min(m, n)) if oracle[i, i] != 0]
    assert list(F.invariants) == want
    assert all(b % a == 0 for a, b in zip(F.invariants, F.invariants[1:]))


def test_cover_bookkeeping(deg2_a1, mod2):
    assert (deg2_a1.n_generators, deg2_a1.rank, deg2_a1.homology_rank) == (7, 1, 6)
    assert (mod2.n_generators, mod2.rank, mod2.homology_rank) == (49, 15, 34)
    assert mod2.genus == 17
    triv = build_cover(trivial_quotient(P2))
    assert triv.homology_rank == 4
    s3 = build_cover(s3_regular())
    assert s3.homology_rank == 6 * 2 + 2


def test_trivial_cover_recovers_base_action():
    triv = build_cover(trivial_quotient(P2))
    f = pseudo_anosov()
    L = lift_action(triv, f)
    assert char_poly(L.matrix).coefficients == char_poly(np.array(homology_action(f), dtype=object)).coefficients


def test_identity_lift(mod2):
    L = lift_action(mod2, identity_automorphism(P2))
    assert (L.matrix == np.eye(34, dtype=int)).all()
    assert L.char_poly.coefficients == MonicPolynomial.from_roots([1] * 34).coefficients


def test_twist_a1_does_not_preserve_a1_swap_cover(deg2_a1):
    with pytest.raises(LiftError, match="does not preserve"):
        lift_action(deg2_a1, twist("c2"))


def test_single_twist_lifts(deg2_a1, deg2_b1):
    for cover, curves in ((deg2_a1, ("c1", "c3", "c4", "c5")), (deg2_b1, ("c2", "c4", "c5"))):
        for c in curves:
            L = lift_action(cover, twist(c))
            assert jensen_square_sum(L.char_poly) == 0.0
            assert is_reciprocal(L.char_poly)


def test_deck_actions(mod2):
    for q in [(0, 0, 0, 0), (1, 0, 0, 0), (1, 1, 0, 1)]:
        D = deck_action(mod2, q)
        D2 = D.dot(D)
        assert (D2 == np.eye(34, dtype=int)).all()
        assert jensen_square_sum(char_poly(D)) == 0.0
    assert (deck_action(mod2, (0, 0, 0, 0)) == np.eye(34, dtype=int)).all()
    with pytest.raises(InputError):
        deck_action(mod2, (1, 2, 3))


def test_deck_actions_nonabelian():
    cover = build_cover(s3_regular())
    for c in range(cover.degree):
        D = deck_action(cover, cover.transversal[c])
        P = np.eye(cover.homology_rank, dtype=int).astype(object)
        orders = []
        for k in range(1, 7):
            P = P.dot(D)
            if (P == np.eye(cover.homology_rank, dtype=int)).all():
                orders.append(k)
        assert orders and 6 % orders[0] == 0


def test_lift_invariants(mod2):
    f = pseudo_anosov()
    L = lift_action(mod2, f)
    assert L.determinant in (1, -1)
    assert is_reciprocal(L.char_poly)
    assert restriction_check(mod2, L, f)


def test_identity_coset_lifts_compose(mod2):
    f, g = twist("c1", -1), twist("c3")
    Lf, Lg = lift_action(mod2, f), lift_action(mod2, g)
    Lfg = lift_action(mod2, f.compose(g))
    assert (Lfg.matrix == Lf.matrix.dot(Lg.matrix)).all()


def test_growth_table_identity():
    covers = [mod_k_cover(P2, 2), mod_k_cover(P2, 3)]
    rows = growth_table(identity_automorphism(P2), covers)
    for r in rows:
        assert (r.m, r.w, r.h) == (0.0, 0.0, 0.0)
        assert r.sqrt_genus_over_n == math.sqrt(1 + 1 / r.n)
    text = table_csv(rows, with_flag=False)
    assert "wp_flag" not in text.splitlines()[0]
    assert len(text.splitlines()) == 3
