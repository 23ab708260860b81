import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from ftsbreak.errors import DataError
from ftsbreak.fda import make_fts, quadrature_weights
from ftsbreak.fpcr import (
    I1_DRIFT,
    STATIONARY_AR,
    FPCRModel,
    fit_fpcr,
    fit_lee_carter,
    forecast_curve,
    forecast_scores,
    independence_test,
    lee_carter_forecast,
)
from ftsbreak.simlab import fourier_basis

from conftest import GRID, smooth_iid

BASIS = fourier_basis(GRID, 5)


def ar1(n, phi, rng, sd=1.0):
    e = sd * rng.standard_normal(n)
    a = np.empty(n)
    a[0] = e[0]
    for t in range(1, n):
        a[t] = phi * a[t - 1] + e[t]
    return a


def single_factor(rng, n=100):
    return make_fts(GRID, 1.0 + np.outer(np.cumsum(rng.standard_normal(n)), BASIS[1]))


def two_factor(rng, n=100):
    walk = np.cumsum(rng.standard_normal(n))
    x = np.outer(walk, BASIS[1]) + np.outer(ar1(n, 0.9, rng, 0.3), BASIS[2])
    return make_fts(GRID, x + 0.05 * rng.standard_normal((n, 5)) @ BASIS)


def test_single_factor_gives_one_component():
    hits = 0
    for r in range(100):
        m = fit_fpcr(single_factor(np.random.default_rng([31, r])))
        hits += m.r == 1 and m.K == 1 and m.independence_p > 0.05
    assert hits >= 90


def test_white_noise_passes_independence():
    passes = sum(fit_fpcr(smooth_iid(100, np.random.default_rng([32, r]))).independence_p > 0.05 for r in range(100))
    assert passes >= 85


def test_two_factor_adds_stationary_component():
    hits = sum(
        (lambda m: m.r == 1 and m.K == 2)(fit_fpcr(two_factor(np.random.default_rng([33, r])))) for r in range(100)
    )
    assert hits > 50


def test_residual_identity(rng):
    fts = two_factor(rng)
    m = fit_fpcr(fts)
    w = quadrature_weights(GRID)
    scores_r = (fts.values - m.mean.values) @ (w[:, None] * m.eigenfunctions[: m.r].T)
    expected = fts.values - m.mean.values - scores_r @ m.eigenfunctions[: m.r]
    np.testing.assert_allclose(m.residuals.values, expected, atol=1e-10)
    assert 1 <= m.r <= m.K
    assert m.score_kinds() == [I1_DRIFT] * m.r + [STATIONARY_AR] * (m.K - m.r)


def test_fit_needs_eight_curves(rng):
    with pytest.raises(DataError):
        fit_fpcr(smooth_iid(7, rng))


def test_independence_size_and_power():
    size = np.mean([independence_test(smooth_iid(300, np.random.default_rng([34, r]))) < 0.05 for r in range(500)])
    assert 0.02 <= size <= 0.09
    power = 0
    sd = np.array([1, 0.8, 0.6, 0.4, 0.2])
    for r in range(200):
        rng = np.random.default_rng([35, r])
        scores = np.column_stack([ar1(300, 0.6, rng, s) for s in sd])
        power += independence_test(make_fts(GRID, scores @ BASIS)) < 0.05
    assert power / 200 >= 0.9


def test_independence_precondition(rng):
    with pytest.raises(DataError):
        independence_test(smooth_iid(12, rng), H=10, d=2)


@settings(max_examples=15, deadline=None)
@given(st.integers(0, 2**32 - 1), st.floats(0.01, 100.0))
def test_independence_scale_invariant(seed, a):
    fts = smooth_iid(60, np.random.default_rng(seed))
    p = independence_test(fts, d=3)
    q = independence_test(fts.with_values(a * fts.values), d=3)
    assert q == pytest.approx(p, abs=1e-8)


def test_score_forecast_examples(rng):
    assert forecast_scores([1, 2, 3, 4, 5], I1_DRIFT, 2) == 7
    assert forecast_scores([2.5] * 6, STATIONARY_AR, 3) == 2.5
    for _ in range(20):
        y = rng.standard_normal(15).cumsum()
        h = int(rng.integers(1, 6))
        drift = (y[-1] - y[0]) / (len(y) - 1)
        assert forecast_scores(y, I1_DRIFT, h) == pytest.approx(y[-1] + h * drift, rel=1e-12, abs=1e-12)
    with pytest.raises(ValueError):
        forecast_scores([1, 2, 3], I1_DRIFT, 0)
    with pytest.raises(DataError):
        forecast_scores([1, 2], I1_DRIFT, 1)


def test_ar_forecast_by_hand():
    y = np.array([1.0, 3.0, 2.0, 4.0, 3.0])
    m = y.mean()
    phi = np.sum((y[1:] - m) * (y[:-1] - m)) / np.sum((y[:-1] - m) ** 2)
    assert forecast_scores(y, STATIONARY_AR, 2) == pytest.approx(m + phi**2 * (y[-1] - m), rel=1e-14)


def test_forecast_curve_assembly(rng):
    fts = single_factor(rng)
    m = fit_fpcr(fts)
    s = m.scores[:, 0]
    hand = m.mean.values + (s[-1] + np.mean(np.diff(s))) * m.eigenfunctions[0]
    out = forecast_curve(m, 1)
    np.testing.assert_allclose(out.values, hand, atol=1e-12)
    np.testing.assert_array_equal(out.grid, fts.grid)
    zero = FPCRModel(m.mean, 1, 1, m.eigenfunctions, np.zeros_like(m.scores), m.residuals, 1.0, m.eigenvalues)
    np.testing.assert_allclose(forecast_curve(zero, 3).values, m.mean.values, atol=1e-15)
    with pytest.raises(ValueError):
        forecast_curve(m, 0)


def test_linear_scores_continue_exactly():
    t = np.arange(30.0)
    fts = make_fts(GRID, 2.0 + np.outer(0.5 * t, BASIS[2]))
    m = fit_lee_carter(fts)
    for h in (1, 4):
        np.testing.assert_allclose(lee_carter_forecast(fts, h).values, 2.0 + 0.5 * (29 + h) * BASIS[2], atol=1e-8)
    assert m.r == m.K == 1


def test_lee_carter_rank_one_mortality_surface():
    ages = np.arange(0.0, 101.0)
    a = -4 + 0.03 * ages
    b = np.exp(-ages / 50)
    k = -0.3 * np.arange(40.0)
    fts = make_fts(ages, a + np.outer(k, b))
    out = lee_carter_forecast(fts, 3)
    np.testing.assert_allclose(out.values, a + (-0.3 * 42) * b, atol=1e-8)
    assert out.values.size == ages.size


def test_lee_carter_constant_surface():
    fts = make_fts(GRID, np.tile(np.cos(GRID), (6, 1)))
    np.testing.assert_allclose(lee_carter_forecast(fts, 2).values, np.cos(GRID), atol=1e-14)
    with pytest.raises(DataError):
        lee_carter_forecast(fts.window(0, 2))
