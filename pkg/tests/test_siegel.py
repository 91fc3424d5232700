import math

import numpy as np
import pytest
from conftest import random_point

from siegeltl.errors import InputError, NumericalError, ValidationError
from siegeltl.siegel import (
    SiegelTangent,
    act,
    base_point,
    cross_ratio,
    dist,
    displacement,
    format_siegel_point,
    hodge_subspace,
    parse_siegel_point,
    projector_distance,
    siegel_point,
    tangent_norm,
    translation_length_closed,
    translation_length_numeric,
)
from siegeltl.symplinalg import (
    as_matrix,
    block_central,
    block_elliptic,
    block_hyperbolic,
    block_loxodromic,
    direct_sum,
    jordan_chevalley,
    random_symplectic,
    unipotent_power,
    validate_symplectic,
)


def upper_half_plane_dist(z, w):
    return math.acosh(1 + abs(z - w) ** 2 / (2 * z.imag * w.imag))


def test_point_validation():
    with pytest.raises(ValidationError):
        siegel_point([[1j, 0], [1, 1j]])
    with pytest.raises(ValidationError):
        siegel_point([[-1j]])
    with pytest.raises(InputError):
        siegel_point(np.zeros((2, 3)), np.ones((2, 3)))


def test_act_examples():
    Z = siegel_point([[0.3 + 2j]])
    assert np.allclose(act(block_central(1), Z).Z, Z.Z)
    assert act(block_hyperbolic(2), base_point(1)).Z[0, 0] == pytest.approx(4j)
    W = act(block_loxodromic(2, math.pi / 3), base_point(2))
    assert np.allclose(W.Z, 4j * np.eye(2), atol=1e-12)


def test_cross_ratio_examples():
    Z = base_point(1)
    assert np.allclose(cross_ratio(Z, Z), 0)
    for t in (0.5, 2.0, 7.0):
        R = cross_ratio(Z, siegel_point([[1j * t]]))
        assert R[0, 0] == pytest.approx(((1 - t) / (1 + t)) ** 2)


def test_cross_ratio_spectrum_invariant(rng):
    for _ in range(10):
        p = int(rng.integers(1, 4))
        M = random_symplectic(p, seed=int(rng.integers(1 << 30)), word_length=3)
        Z, W = random_point(rng, p), random_point(rng, p)
        e1 = np.sort_complex(np.linalg.eigvals(cross_ratio(Z, W)))
        e2 = np.sort_complex(np.linalg.eigvals(cross_ratio(act(M, Z), act(M, W))))
        assert np.allclose(e1, e2, atol=1e-9)


def test_dist_examples():
    Z = base_point(3)
    assert dist(Z, Z) == 0
    for t in (0.3, 4.0):
        W = siegel_point(np.zeros((3, 3)), t * np.eye(3))
        assert dist(Z, W) == pytest.approx(math.sqrt(3) * abs(math.log(t)), abs=1e-12)
    assert dist(base_point(1), siegel_point([[4j]])) == pytest.approx(2 * math.log(2), abs=1e-12)


def test_series_and_spectral_agree(rng):
    for _ in range(30):
        p = int(rng.integers(1, 5))
        Z, W = random_point(rng, p), random_point(rng, p)
        assert dist(Z, W, "series") == pytest.approx(dist(Z, W, "spectral"), rel=1e-9, abs=1e-10)


def test_upper_half_plane(rng):
    for _ in range(50):
        z = complex(rng.normal(), math.exp(rng.normal()))
        w = complex(rng.normal(), math.exp(rng.normal()))
        d = dist(siegel_point([[z]]), siegel_point([[w]]))
        assert abs(d - upper_half_plane_dist(z, w)) <= 1e-10


def test_isometry_and_axioms(rng):
    for _ in range(20):
        p = int(rng.integers(1, 5))
        M = random_symplectic(p, seed=int(rng.integers(1 << 30)), word_length=3)
        Z, W, V = (random_point(rng, p) for _ in range(3))
        d = dist(Z, W)
        assert abs(dist(act(M, Z), act(M, W)) - d) <= 1e-9
        assert abs(dist(W, Z) - d) <= 1e-12 * max(1, d)
        assert d <= dist(Z, V) + dist(V, W) + 1e-9


def test_tangent_norm():
    Z = base_point(1)
    assert tangent_norm(SiegelTangent(Z, [[0]])) == 0
    assert tangent_norm(SiegelTangent(Z, [[1]])) == pytest.approx(1)
    assert tangent_norm(SiegelTangent(siegel_point([[3j]]), [[0.6]])) == pytest.approx(0.2)


def test_tangent_norm_is_infinitesimal_distance(rng):
    Z = random_point(rng, 2)
    dZ = rng.normal(size=(2, 2)) + 1j * rng.normal(size=(2, 2))
    dZ = 0.5 * (dZ + dZ.T)
    h = 1e-6
    W = siegel_point(Z.Z + h * dZ)
    assert dist(Z, W) / h == pytest.approx(tangent_norm(SiegelTangent(Z, dZ)), rel=1e-5)


def test_closed_form_examples():
    assert translation_length_closed(block_hyperbolic(2)) == pytest.approx(2 * math.log(2), abs=1e-12)
    for theta in (0.1, 1.0, 2.5):
        assert translation_length_closed(block_elliptic(theta)) == pytest.approx(0, abs=1e-12)
    L = block_loxodromic(2, math.pi / 3)
    assert translation_length_closed(L) == pytest.approx(math.sqrt(2) * 2 * math.log(2), abs=1e-12)
    assert displacement(L, base_point(2)) == pytest.approx(translation_length_closed(L), abs=1e-10)


def test_numeric_examples():
    res = translation_length_numeric(block_central(1), starts=1)
    assert res.estimate == pytest.approx(0, abs=1e-12)
    res = translation_length_numeric(block_hyperbolic(2), starts=2, seed=3)
    assert abs(res.estimate - 2 * math.log(2)) <= 1e-4


def test_conjugation_invariance(rng):
    for seed in range(5):
        M = random_symplectic(2, seed=seed, word_length=4)
        G = random_symplectic(2, seed=100 + seed, word_length=3)
        conj = G @ M @ G.inverse()
        conj = validate_symplectic(conj.array, 1e-6)
        assert translation_length_closed(conj) == pytest.approx(translation_length_closed(M), abs=1e-9)


def test_semisimple_reduction():
    S = direct_sum(block_hyperbolic(3), block_elliptic(0.7))
    U = validate_symplectic(as_matrix([[1, 0, 0, 0], [0, 1, 0, 2], [0, 0, 1, 0], [0, 0, 0, 1]]), 0.0)
    M = validate_symplectic(S.array @ U.array, 1e-9)
    pair = jordan_chevalley(M)
    assert translation_length_closed(M) == pytest.approx(translation_length_closed(pair.semisimple), abs=1e-8)


def test_semicontinuity_probe():
    H = block_hyperbolic(2)
    U = validate_symplectic(as_matrix([[1, 1], [0, 1]]), 0.0)
    Z = base_point(1)
    vals = []
    for m in range(1, 40):
        M = H @ unipotent_power(U, 1 / m)
        vals.append(displacement(M, Z))
    assert all(b <= a + 1e-9 for a, b in zip(vals, vals[1:]))
    assert vals[-1] == pytest.approx(displacement(H, Z), abs=2e-3)


def test_hodge_frame(rng):
    F = hodge_subspace(base_point(2))
    want = np.vstack([np.eye(2), 1j * np.eye(2)])
    assert projector_distance(F.basis, want) <= 1e-12
    for _ in range(10):
        p = int(rng.integers(1, 4))
        Z = random_point(rng, p)
        M = random_symplectic(p, seed=int(rng.integers(1 << 30)), word_length=3)
        F = hodge_subspace(Z)
        assert np.linalg.eigvalsh(F.gram)[0] > 0
        moved = hodge_subspace(act(M, Z))
        assert projector_distance(moved.basis, M.array @ F.basis) <= 1e-9


def test_far_points_series_cap():
    Z, W = base_point(1), siegel_point([[1e9j]])
    with pytest.raises(NumericalError):
        dist(Z, W)
    assert dist(Z, W, "spectral") == pytest.approx(math.log(1e9), rel=1e-12)


def test_point_roundtrip(rng):
    Z = random_point(rng, 2)
    W = parse_siegel_point(format_siegel_point(Z))
    assert np.array_equal(W.Z, Z.Z)
