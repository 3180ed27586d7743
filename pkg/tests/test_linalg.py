import numpy as np
import pytest

from splitlbi import linalg
from splitlbi.errors import InvalidMatrix


def random_matrix(rng, max_dim=20):
    shape = rng.integers(1, max_dim + 1, size=2)
    M = rng.standard_normal(shape)
    if rng.random() < 0.3:  # force rank deficiency
        r = int(rng.integers(1, min(shape) + 1))
        M = rng.standard_normal((shape[0], r)) @ rng.standard_normal((r, shape[1]))
    return M


def test_compact_svd_identity():
    f = linalg.compact_svd(np.eye(3))
    assert f.rank == 3
    np.testing.assert_allclose(f.S, np.ones(3))
    np.testing.assert_allclose(np.abs(f.U.T @ f.V), np.eye(3), atol=1e-12)


def test_compact_svd_zero_matrix():
    f = linalg.compact_svd(np.zeros((2, 3)))
    assert f.rank == 0
    assert f.U.shape == (2, 0)
    assert f.V.shape == (3, 0)


def test_compact_svd_reconstruction():
    rng = np.random.default_rng(11)
    M = rng.standard_normal((4, 3))
    f = linalg.compact_svd(M)
    assert np.abs(f.reconstruct() - M).max() < 1e-8 * np.abs(M).max()
    np.testing.assert_allclose(f.U.T @ f.U, np.eye(f.rank), atol=1e-10)
    np.testing.assert_allclose(f.V.T @ f.V, np.eye(f.rank), atol=1e-10)
    assert np.all(np.diff(f.S) <= 0)


def test_compact_svd_rejects_nonfinite():
    with pytest.raises(InvalidMatrix):
        linalg.compact_svd(np.array([[np.nan, 1.0]]))
    with pytest.raises(InvalidMatrix):
        linalg.compact_svd(np.array([[np.inf], [0.0]]))


def test_pseudoinverse_identity_and_diagonal():
    np.testing.assert_allclose(linalg.pseudoinverse(np.eye(4)), np.eye(4), atol=1e-12)
    np.testing.assert_allclose(
        linalg.pseudoinverse(np.diag([2.0, 0.0])), np.diag([0.5, 0.0]), atol=1e-12
    )


def _check_penrose(M, tol=1e-8):
    Mp = linalg.pseudoinverse(M)
    scale = max(1.0, np.abs(M).max())
    assert np.abs(M @ Mp @ M - M).max() < tol * scale
    assert np.abs(Mp @ M @ Mp - Mp).max() < tol * scale
    assert np.abs((M @ Mp) - (M @ Mp).T).max() < tol * scale
    assert np.abs((Mp @ M) - (Mp @ M).T).max() < tol * scale


def test_pseudoinverse_penrose_random():
    rng = np.random.default_rng(5)
    M = rng.standard_normal((3, 5))
    _check_penrose(M)


@pytest.mark.parametrize("seed", range(25))
def test_penrose_property_sweep(seed):
    rng = np.random.default_rng(1000 + seed)
    for _ in range(8):
        _check_penrose(random_matrix(rng))


def test_pinv_gram_identity():
    # pinv(Q) == pinv(Q.T Q) Q.T on random instances
    rng = np.random.default_rng(3)
    for _ in range(20):
        Q = random_matrix(rng, max_dim=12)
        lhs = linalg.pseudoinverse(Q)
        rhs = linalg.pseudoinverse(Q.T @ Q) @ Q.T
        assert np.abs(lhs - rhs).max() < 1e-7 * max(1.0, np.abs(lhs).max())


def test_projection_zero_rows_gives_identity():
    P = linalg.projection_onto_kernel(np.zeros((0, 4)))
    np.testing.assert_allclose(P, np.eye(4))


def test_projection_coordinate_selector():
    M = np.zeros((1, 3))
    M[0, 1] = 1.0  # selects coordinate 1
    P = linalg.projection_onto_kernel(M)
    np.testing.assert_allclose(P, np.diag([1.0, 0.0, 1.0]), atol=1e-12)


def test_projection_idempotent_and_annihilating():
    rng = np.random.default_rng(9)
    M = rng.standard_normal((2, 4))
    P = linalg.projection_onto_kernel(M)
    assert np.abs(P @ P - P).max() < 1e-8
    assert np.abs(M @ P).max() < 1e-8
    assert np.abs(P - P.T).max() < 1e-12


def test_kernel_basis_spans_nullspace():
    rng = np.random.default_rng(13)
    M = rng.standard_normal((2, 5))
    K = linalg.kernel_basis(M)
    assert K.shape == (5, 3)
    assert np.abs(M @ K).max() < 1e-10
    np.testing.assert_allclose(K.T @ K, np.eye(3), atol=1e-10)


def test_spectral_bounds_identity_and_scaling():
    X = np.zeros((4, 3))
    b = linalg.spectral_bounds(X, np.eye(3))
    assert b.d_min_pos == pytest.approx(1.0)
    assert b.d_max == pytest.approx(1.0)
    assert b.x_max == 0.0
    b2 = linalg.spectral_bounds(X, 2.0 * np.eye(3))
    assert b2.d_min_pos == pytest.approx(2.0)
    assert b2.d_max == pytest.approx(2.0)


def test_spectral_bounds_fused_vs_direct_svd():
    from splitlbi.designs import build_fused_1d

    rng = np.random.default_rng(2)
    X = rng.standard_normal((6, 5))
    D = build_fused_1d(5)
    S = list(range(4))  # the difference rows
    b = linalg.spectral_bounds(X, D, S)
    sv_D = np.linalg.svd(D, compute_uv=False)
    sv_comp = np.linalg.svd(D[4:], compute_uv=False)
    assert b.d_max == pytest.approx(sv_D[0])
    assert b.d_min_pos == pytest.approx(min(sv_D[sv_D > 1e-12].min(), sv_comp.min()))
    assert b.x_max == pytest.approx(np.linalg.svd(X, compute_uv=False)[0] / np.sqrt(6))
