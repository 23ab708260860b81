import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from ftsbreak.errors import DegenerateError
from ftsbreak.fda import Curve, make_fts, mean_function, quadrature_weights
from ftsbreak.longrun import CovarianceSurface, lag0_covariance
from ftsbreak.spectral import eigendecompose, eigenvalue_ratio_r, fpc_scores, reconstruct


def gram(eig):
    w = quadrature_weights(eig.grid)
    return eig.eigenfunctions @ (w[:, None] * eig.eigenfunctions.T)


def test_rank_one_surface():
    u = np.linspace(0, 1, 201)
    c = 2 * np.sqrt(3) * u  # integral of c^2 is 4 exactly for the continuous curve
    c = c * 2 / np.sqrt(quadrature_weights(u) @ (c * c))
    eig = eigendecompose(CovarianceSurface(u, np.outer(c, c)))
    assert eig.eigenvalues[0] == pytest.approx(4.0, rel=1e-12)
    np.testing.assert_allclose(eig.eigenfunctions[0], c / 2, atol=1e-10)
    assert eig.eigenvalues[1] < 1e-12


def test_diagonal_surface_against_plain_solver():
    u = np.linspace(0, 1, 21)
    w = quadrature_weights(u)
    s = np.diag(1 / w)  # the operator C diag(w) is the identity
    eig = eigendecompose(CovarianceSurface(u, s))
    np.testing.assert_allclose(eig.eigenvalues, np.ones(21), atol=1e-12)
    np.testing.assert_allclose(gram(eig), np.eye(21), atol=1e-8)
    rng = np.random.default_rng(1)
    a = rng.standard_normal((21, 21))
    s = a @ a.T
    oracle = np.sort(np.linalg.eigvals(s @ np.diag(w)).real)[::-1]
    np.testing.assert_allclose(eigendecompose(CovarianceSurface(u, s)).eigenvalues, oracle, rtol=1e-9, atol=1e-10)


def test_reassembly(rng):
    fts = make_fts(np.linspace(0, 1, 31), rng.standard_normal((12, 31)))
    cov = lag0_covariance(fts)
    eig = eigendecompose(cov)
    rebuilt = (eig.eigenfunctions.T * eig.eigenvalues) @ eig.eigenfunctions
    np.testing.assert_allclose(rebuilt, cov.surface, atol=1e-6)


def test_clipping_and_sign_convention():
    u = np.linspace(0, 1, 5)
    s = -np.eye(5)
    eig = eigendecompose(CovarianceSurface(u, s))
    assert np.all(eig.eigenvalues == 0)
    rng = np.random.default_rng(2)
    a = rng.standard_normal((5, 5))
    for phi in eigendecompose(CovarianceSurface(u, a @ a.T)).eigenfunctions:
        assert phi[np.argmax(np.abs(phi))] > 0


def test_scores_examples(rng):
    u = np.linspace(0, 1, 41)
    fts = make_fts(u, rng.standard_normal((15, 41)))
    eig = eigendecompose(lag0_covariance(fts))
    mean = mean_function(fts)
    flat = make_fts(u, np.tile(mean.values, (4, 1)))
    assert np.abs(fpc_scores(flat, eig.eigenfunctions[:3], mean)).max() < 1e-12
    aligned = make_fts(u, np.tile(mean.values + 3 * eig.eigenfunctions[0], (4, 1)))
    s = fpc_scores(aligned, eig.eigenfunctions[:3], mean)
    np.testing.assert_allclose(s, np.tile([3.0, 0, 0], (4, 1)), atol=1e-8)
    w = quadrature_weights(u)
    oracle = [[float(np.sum(w * (fts.values[t] - mean.values) * eig.eigenfunctions[k])) for k in range(4)] for t in range(15)]
    np.testing.assert_allclose(fpc_scores(fts, eig, mean)[:, :4], oracle, atol=1e-12)


def test_reconstruct_examples(rng):
    u = np.linspace(0, 1, 25)
    fts = make_fts(u, rng.standard_normal((10, 25)))
    mean = mean_function(fts)
    eig = eigendecompose(lag0_covariance(fts))
    scores = fpc_scores(fts, eig, mean)
    np.testing.assert_array_equal(reconstruct(mean, eig, scores, 0).values, np.tile(mean.values, (10, 1)))
    K = min(fts.n - 1, fts.J)
    np.testing.assert_allclose(reconstruct(mean, eig, scores, K).values, fts.values, atol=1e-6)
    c = np.sin(np.pi * u)
    rank1 = make_fts(u, np.outer(rng.standard_normal(8), c))
    m1 = mean_function(rank1)
    e1 = eigendecompose(lag0_covariance(rank1))
    np.testing.assert_allclose(reconstruct(m1, e1, fpc_scores(rank1, e1, m1), 1).values, rank1.values, atol=1e-10)


def test_ratio_examples():
    assert eigenvalue_ratio_r([10, 1e-9, 1e-10], 100) == 1
    assert eigenvalue_ratio_r([8, 4, 0.02, 0.004], 100) == 2
    assert eigenvalue_ratio_r(0.5 ** np.arange(12), 100) == 1
    with pytest.raises(DegenerateError):
        eigenvalue_ratio_r([0.0, 0.0], 10)


def test_ratio_threshold_by_hand():
    lam = np.array([8, 4, 0.02, 0.004])
    theta = 1 / math.log(100)
    assert theta == pytest.approx(0.2171, abs=1e-4)
    assert np.sum(lam >= lam.sum() / 100) == 2


@settings(max_examples=60, deadline=None)
@given(st.lists(st.floats(1e-6, 1e3), min_size=1, max_size=15), st.integers(2, 500))
def test_ratio_in_range(values, n):
    lam = np.sort(np.array(values))[::-1]
    r = eigenvalue_ratio_r(lam, n)
    assert 1 <= r <= max(int(np.sum(lam >= lam.sum() / n)), 1)


@settings(max_examples=25, deadline=None)
@given(st.integers(0, 2**32 - 1), st.floats(0.01, 100.0))
def test_orthonormal_and_scale_equivariant(seed, a):
    rng = np.random.default_rng(seed)
    u = np.sort(np.concatenate([[0.0, 1.0], rng.uniform(0, 1, 13)]))
    fts = make_fts(u, rng.standard_normal((9, u.size)))
    cov = lag0_covariance(fts)
    eig = eigendecompose(cov)
    r = int(np.sum(eig.eigenvalues > 1e-10 * eig.eigenvalues[0]))
    np.testing.assert_allclose(gram(eig.head(r)), np.eye(r), atol=1e-8)
    scaled = eigendecompose(CovarianceSurface(u, a * cov.surface))
    np.testing.assert_allclose(scaled.eigenvalues[:r], a * eig.eigenvalues[:r], rtol=1e-8)
    for k in range(min(r, 3)):
        assert abs(abs(scaled.eigenfunctions[k] @ (quadrature_weights(u) * eig.eigenfunctions[k])) - 1) < 1e-6
    lam = eig.eigenvalues[:r]
    if a * lam[0] < 1000 and lam[0] < 1000:
        assert eigenvalue_ratio_r(a * lam, 1000) == eigenvalue_ratio_r(lam, 1000)


def test_eigenfunction_accessor():
    u = np.linspace(0, 1, 3)
    eig = eigendecompose(CovarianceSurface(u, np.diag([1.0, 2.0, 3.0])))
    assert isinstance(eig.eigenfunction(0), Curve)
    assert len(eig.head(2)) == 2
