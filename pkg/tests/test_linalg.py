import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from vaflow.errors import InvalidInput
from vaflow.linalg import nullspace_projector, pinv, svd

from conftest import random_matrix

J0 = np.array([[0.0, 0.0, 0.0], [3.0, 2.0, 1.0]])


def penrose_residuals(a, g):
    return (
        np.abs(a @ g @ a - a).max(),
        np.abs(g @ a @ g - g).max(),
        np.abs((a @ g).T - a @ g).max(),
        np.abs((g @ a).T - g @ a).max(),
    )


def test_svd_identity():
    np.testing.assert_allclose(svd(np.eye(2)).singular_values, [1.0, 1.0])


def test_svd_diagonal_with_zero():
    np.testing.assert_allclose(svd(np.diag([3.0, 0.0])).singular_values, [3.0, 0.0], atol=1e-15)


def test_svd_fully_stretched_jacobian():
    res = svd(J0)
    np.testing.assert_allclose(res.singular_values, [math.sqrt(14), 0.0], atol=1e-12)
    assert res.rank == 1


def test_svd_rejects_nonfinite():
    with pytest.raises(InvalidInput):
        svd([[1.0, np.nan]])


@pytest.mark.parametrize("shape", [(1, 1), (2, 3), (3, 2), (4, 4), (6, 5)])
def test_svd_invariants(rng, shape):
    a = rng.standard_normal(shape)
    res = svd(a)
    s = res.singular_values
    assert np.all(np.diff(s) <= 0) and np.all(s >= 0)
    r = len(s)
    np.testing.assert_allclose(res.u.T @ res.u, np.eye(r), atol=1e-10)
    np.testing.assert_allclose(res.vt @ res.vt.T, np.eye(r), atol=1e-10)
    np.testing.assert_allclose(res.u @ np.diag(s) @ res.vt, a, atol=1e-10 * s[0])


def test_svd_deterministic(rng):
    a = rng.standard_normal((3, 4))
    r1, r2 = svd(a), svd(a)
    assert np.array_equal(r1.u, r2.u) and np.array_equal(r1.singular_values, r2.singular_values)


def test_pinv_identity():
    np.testing.assert_allclose(pinv(np.eye(3)), np.eye(3))


def test_pinv_stretched_jacobian():
    expected = np.array([[0.0, 3 / 14], [0.0, 2 / 14], [0.0, 1 / 14]])
    np.testing.assert_allclose(pinv(J0), expected, atol=1e-14)


def test_pinv_zero_matrix():
    g = pinv(np.zeros((2, 3)))
    assert g.shape == (3, 2)
    assert np.all(g == 0)


def test_pinv_rejects_negative_cutoff():
    with pytest.raises(InvalidInput):
        pinv(np.eye(2), sigma_cutoff=-1.0)


@settings(max_examples=60, deadline=None)
@given(
    m=st.integers(1, 6),
    n=st.integers(1, 6),
    rank_frac=st.floats(0, 1),
    seed=st.integers(0, 2**32 - 1),
)
def test_penrose_conditions(m, n, rank_frac, seed):
    rng = np.random.default_rng(seed)
    rank = int(round(rank_frac * min(m, n)))
    a = random_matrix(rng, m, n, rank)
    g = pinv(a)
    for r in penrose_residuals(a, g):
        assert r < 1e-10


@pytest.mark.parametrize("n", [1, 2, 4, 6])
def test_pinv_twice_reconstructs(rng, n):
    a = rng.standard_normal((n, n)) + n * np.eye(n)
    np.testing.assert_allclose(pinv(pinv(a)), a, atol=1e-9)


def test_projector_full_rank_is_zero(rng):
    j = rng.standard_normal((3, 3)) + 3 * np.eye(3)
    np.testing.assert_allclose(nullspace_projector(j, pinv(j)), np.zeros((3, 3)), atol=1e-12)


def test_projector_single_row():
    j = np.array([[1.0, 0.0]])
    np.testing.assert_allclose(nullspace_projector(j, pinv(j)), np.diag([0.0, 1.0]), atol=1e-15)


def test_projector_stretched_jacobian_trace():
    p = nullspace_projector(J0, pinv(J0))
    assert np.trace(p) == pytest.approx(2.0, abs=1e-12)


def test_projector_dimension_mismatch():
    with pytest.raises(InvalidInput):
        nullspace_projector(J0, np.zeros((2, 2)))


@settings(max_examples=40, deadline=None)
@given(m=st.integers(1, 4), n=st.integers(1, 6), seed=st.integers(0, 2**32 - 1))
def test_projector_idempotent_and_annihilated(m, n, seed):
    rng = np.random.default_rng(seed)
    j = random_matrix(rng, m, n, rank=min(m, n, max(1, m - 1)))
    p = nullspace_projector(j, pinv(j))
    assert np.abs(p @ p - p).max() < 1e-10
    assert np.abs(j @ p).max() < 1e-10
