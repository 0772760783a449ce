import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from geotransfer import (
    DimensionMismatch,
    GramPair,
    NotPositiveDefinite,
    NotSymmetric,
    decompose,
    discrepancy,
    from_eigenbasis,
    to_eigenbasis,
)

from conftest import random_pair


def residuals(dec):
    E = dec.basis
    r_t = np.abs(E.T @ dec.gram_target @ E - np.eye(dec.dim)).max()
    r_s = np.abs(E.T @ dec.gram_source @ E - np.diag(dec.raw_eigenvalues)).max()
    return r_t, r_s


def test_identity_target_metric():
    dec = decompose(GramPair(np.diag([4.0, 1.0]), np.eye(2)))
    np.testing.assert_allclose(dec.eigenvalues, [4.0, 1.0])
    np.testing.assert_allclose(dec.basis, np.eye(2), atol=1e-15)


def test_equal_diagonal_grams_give_unit_eigenvalues():
    G = np.diag([4.0, 1.0])
    dec = decompose(GramPair(G, G))
    np.testing.assert_allclose(dec.eigenvalues, [1.0, 1.0])
    np.testing.assert_allclose(dec.basis, np.diag([0.5, 1.0]), atol=1e-15)
    np.testing.assert_allclose(dec.basis.T @ G @ dec.basis, np.eye(2), atol=1e-15)


@pytest.mark.parametrize("d", [1, 2, 5, 12, 20])
def test_normalization_invariants(rng, d):
    for _ in range(20):
        dec = decompose(random_pair(rng, d))
        r_t, r_s = residuals(dec)
        tol = 1e-8 * (1 + dec.eigenvalues[0])
        assert r_t <= tol and r_s <= tol
        assert np.all(np.diff(dec.eigenvalues) <= 0)
        assert np.all(dec.eigenvalues > 0)


@settings(max_examples=50, deadline=None)
@given(seed=st.integers(0, 2**32 - 1), d=st.integers(1, 10),
       scale=st.floats(1e-3, 1e3))
def test_scale_equivariance(seed, d, scale):
    pair = random_pair(np.random.default_rng(seed), d)
    a = decompose(pair)
    b = decompose(GramPair(scale * pair.gram_source, pair.gram_target))
    np.testing.assert_allclose(b.eigenvalues, scale * a.eigenvalues, rtol=1e-8)
    gap = np.min(np.abs(np.diff(a.eigenvalues)) / a.eigenvalues[0]) if d > 1 else 1.0
    if gap > 1e-6:
        np.testing.assert_allclose(np.abs(b.basis), np.abs(a.basis), rtol=1e-6, atol=1e-8)


def test_rank_deficient_source_is_clamped(rng):
    X = rng.standard_normal((2, 4))
    dec = decompose(GramPair(X.T @ X, np.eye(4)), rank_tol=1e-10)
    assert dec.clamped.sum() == 2
    assert np.all(dec.eigenvalues >= 1e-10 * dec.eigenvalues[0])
    assert not dec.basis.flags.writeable


def test_errors():
    with pytest.raises(NotPositiveDefinite):
        decompose(GramPair(np.eye(2), np.diag([1.0, 0.0])))
    with pytest.raises(NotSymmetric):
        GramPair(np.array([[1.0, 0.5], [0.0, 1.0]]), np.eye(2))
    with pytest.raises(DimensionMismatch):
        GramPair(np.eye(2), np.eye(3))
    with pytest.raises(ValueError):
        decompose(GramPair(np.eye(2), np.eye(2)), rank_tol=1.0)


def test_deterministic_signs(rng):
    pair = random_pair(rng, 6)
    a, b = decompose(pair), decompose(pair)
    assert np.array_equal(a.basis, b.basis)
    idx = np.argmax(np.abs(a.basis), axis=0)
    assert np.all(a.basis[idx, np.arange(6)] > 0)


def test_coordinate_maps_examples():
    dec = decompose(GramPair(np.diag([4.0, 1.0]), np.eye(2)))
    np.testing.assert_allclose(to_eigenbasis([3.0, -1.0], dec), [3.0, -1.0])
    np.testing.assert_allclose(from_eigenbasis([0.0, 0.0], dec), [0.0, 0.0])
    G = np.diag([4.0, 1.0])
    dec = decompose(GramPair(G, G))
    np.testing.assert_allclose(to_eigenbasis([1.0, 1.0], dec), [2.0, 1.0])
    np.testing.assert_allclose(from_eigenbasis([2.0, 1.0], dec), [1.0, 1.0])
    with pytest.raises(DimensionMismatch):
        to_eigenbasis([1.0, 2.0, 3.0], dec)


def test_round_trip_and_linearity(rng):
    for _ in range(100):
        d = int(rng.integers(1, 21))
        dec = decompose(random_pair(rng, d))
        theta = rng.standard_normal(d)
        back = from_eigenbasis(to_eigenbasis(theta, dec), dec)
        np.testing.assert_allclose(back, theta, rtol=1e-8, atol=1e-8 * np.abs(theta).max())
        b1, b2 = rng.standard_normal(d), rng.standard_normal(d)
        np.testing.assert_allclose(
            from_eigenbasis(2.5 * b1 - 0.5 * b2, dec),
            2.5 * from_eigenbasis(b1, dec) - 0.5 * from_eigenbasis(b2, dec), atol=1e-10)


def test_discrepancy_examples_and_invariance(rng):
    assert discrepancy([1.0, 2.0], [1.0, 2.0], np.eye(2)) == 0.0
    assert discrepancy([3.0, 4.0], [0.0, 0.0], np.eye(2)) == 25.0
    for _ in range(50):
        d = int(rng.integers(1, 11))
        dec = decompose(random_pair(rng, d))
        a, b = rng.standard_normal(d), rng.standard_normal(d)
        eig = np.sum((to_eigenbasis(a, dec) - to_eigenbasis(b, dec)) ** 2)
        assert discrepancy(a, b, dec.gram_target) == pytest.approx(eig, rel=1e-8)
