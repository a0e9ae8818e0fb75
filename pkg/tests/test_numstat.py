import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy import integrate, special, stats

from crisisgc.errors import ConstantInput, RankDeficient
from crisisgc.numstat import RandomSource, betainc, f_sf, ols, pearson_corr


def test_ols_exact_line():
    fit = ols([[1, 0], [1, 1], [1, 2]], [1, 3, 5])
    np.testing.assert_allclose(fit.coefficients, [1, 2], atol=1e-12)
    assert fit.rss == pytest.approx(0, abs=1e-20)
    assert (fit.n_obs, fit.n_params) == (3, 2)


def test_ols_mean_model():
    fit = ols(np.ones((3, 1)), [2, 2, 2])
    assert fit.coefficients[0] == pytest.approx(2.0)
    assert fit.rss == pytest.approx(0, abs=1e-20)


def test_ols_duplicated_column():
    X = np.column_stack([np.ones(10), np.arange(10.0), np.arange(10.0)])
    with pytest.raises(RankDeficient):
        ols(X, np.arange(10.0))


def test_ols_matches_lstsq(rng):
    X = rng.standard_normal((200, 6))
    y = X @ rng.standard_normal(6) + rng.standard_normal(200)
    fit = ols(X, y)
    ref, res, *_ = np.linalg.lstsq(X, y, rcond=None)
    np.testing.assert_allclose(fit.coefficients, ref, rtol=1e-10)
    assert fit.rss == pytest.approx(res[0], rel=1e-10)


@settings(max_examples=50, deadline=None)
@given(seed=st.integers(0, 2**32 - 1), n=st.integers(8, 200), k=st.integers(1, 6),
       scale=st.floats(1e-3, 1e3))
def test_ols_residuals_orthogonal(seed, n, k, scale):
    r = np.random.default_rng(seed)
    X = r.standard_normal((n, k)) * scale
    y = r.standard_normal(n)
    fit = ols(X, y)
    resid = y - X @ fit.coefficients
    inner = X.T @ resid
    bound = 1e-8 * np.linalg.norm(X, axis=0) * np.linalg.norm(y)
    assert np.all(np.abs(inner) <= bound)
    assert fit.rss >= 0


# --- F distribution ----------------------------------------------------------

@pytest.mark.parametrize("d", [1, 2, 5, 37, 240, 1000])
def test_f_sf_median_for_equal_dof(d):
    assert f_sf(1.0, d, d) == pytest.approx(0.5, abs=1e-12)


def test_f_sf_zero():
    assert f_sf(0.0, 5, 240) == 1.0


def test_f_sf_against_quadrature():
    d1, d2 = 5, 240

    def density(t):
        return stats.f.pdf(t, d1, d2)

    tail, err = integrate.quad(density, 4.0, np.inf, epsabs=1e-14, epsrel=1e-12)
    assert err < 1e-11
    assert f_sf(4.0, d1, d2) == pytest.approx(tail, abs=1e-8)


def test_f_sf_quadrature_with_closed_form_density():
    # independent of scipy.stats: density written out from the Beta function
    d1, d2 = 5, 240
    logc = 0.5 * d1 * math.log(d1 / d2) - (math.lgamma(d1 / 2) + math.lgamma(d2 / 2)
                                           - math.lgamma((d1 + d2) / 2))

    def density(t):
        return math.exp(logc + (d1 / 2 - 1) * math.log(t)
                        - (d1 + d2) / 2 * math.log1p(d1 * t / d2))

    tail, _ = integrate.quad(density, 4.0, np.inf, epsabs=1e-14, epsrel=1e-12)
    assert f_sf(4.0, d1, d2) == pytest.approx(tail, abs=1e-8)


@pytest.mark.parametrize("d1", [1, 2, 3, 5, 10, 50, 300, 1000])
@pytest.mark.parametrize("d2", [1, 4, 30, 240, 999, 1000])
def test_f_sf_relative_accuracy(d1, d2):
    for x in [1e-6, 0.01, 0.3, 0.9, 1.0, 1.7, 3.0, 10.0, 100.0, 1e4]:
        ref = stats.f.sf(x, d1, d2)
        if ref < 1e-290:
            continue
        assert f_sf(x, d1, d2) == pytest.approx(ref, rel=1e-10, abs=0), (x, d1, d2)


@settings(max_examples=200, deadline=None)
@given(a=st.floats(0.05, 500), b=st.floats(0.05, 500), x=st.floats(0, 1))
def test_betainc_matches_scipy(a, b, x):
    assert betainc(a, b, x) == pytest.approx(special.betainc(a, b, x), rel=1e-9, abs=1e-300)


@settings(max_examples=60, deadline=None)
@given(d1=st.integers(1, 1000), d2=st.integers(1, 1000),
       xs=st.lists(st.floats(0, 1e6), min_size=2, max_size=8))
def test_f_sf_monotone(d1, d2, xs):
    xs = sorted(xs)
    vals = [f_sf(x, d1, d2) for x in xs]
    assert all(0.0 <= v <= 1.0 for v in vals)
    assert all(a >= b for a, b in zip(vals, vals[1:]))


def test_f_sf_vanishes_at_infinity():
    assert f_sf(1e12, 5, 240) < 1e-50
    assert f_sf(math.inf, 5, 240) == 0.0


# --- random streams ------------------------------------------------------------

def test_normal_moments():
    z = RandomSource(2024, 0).standard_normal(10**6)
    assert abs(z.mean()) < 0.005
    assert 0.994 <= z.var(ddof=1) <= 1.006


def test_uniform_range():
    u = RandomSource(1, 3).uniform01(10**5)
    assert u.min() >= 0.0 and u.max() < 1.0
    assert abs(u.mean() - 0.5) < 0.005


def test_same_seed_same_sequence():
    a = RandomSource(99, 7)
    b = RandomSource(99, 7)
    assert np.array_equal(a.standard_normal(1000), b.standard_normal(1000))
    assert np.array_equal(a.uniform01(10), b.uniform01(10))


def test_streams_uncorrelated():
    n = 10**5
    streams = [RandomSource(5, k).standard_normal(n) for k in range(6)]
    for i in range(6):
        for j in range(i + 1, 6):
            assert abs(pearson_corr(streams[i], streams[j])) < 0.01


def test_streams_differ_by_seed():
    assert not np.array_equal(RandomSource(1, 0).standard_normal(5), RandomSource(2, 0).standard_normal(5))


# --- correlation -----------------------------------------------------------------

def test_corr_self_and_negation(rng):
    x = rng.standard_normal(50)
    assert pearson_corr(x, x) == pytest.approx(1.0, abs=1e-15)
    assert pearson_corr(x, -x) == pytest.approx(-1.0, abs=1e-15)


def test_corr_independent():
    a = RandomSource(11, 1).standard_normal(10**4)
    b = RandomSource(11, 2).standard_normal(10**4)
    assert abs(pearson_corr(a, b)) < 0.04


def test_corr_constant_rejected():
    with pytest.raises(ConstantInput):
        pearson_corr([1, 1, 1], [1, 2, 3])


@settings(max_examples=50, deadline=None)
@given(seed=st.integers(0, 2**32 - 1), a=st.floats(1e-3, 1e3), b=st.floats(-10, 10),
       c=st.floats(1e-3, 1e3), d=st.floats(-10, 10))
def test_corr_affine_invariance(seed, a, b, c, d):
    # offsets are relative to the scale so the transformed inputs stay exact to ~1e-15
    r = np.random.default_rng(seed)
    x, y = r.standard_normal(100), r.standard_normal(100)
    assert pearson_corr(a * x + a * b, c * y + c * d) == pytest.approx(pearson_corr(x, y), abs=1e-12)
