"""Stable law numerics: closed forms, symmetry, scores, table agreement, sampler"""

import numpy as np
import pytest
from scipy import special, stats

from backend import stable_dist
from backend.exceptions import DomainError, ParameterError, QuadratureError
from backend.stable_dist import QuadratureConfig, StableDist, get_table

EULER = np.euler_gamma
ALPHAS = [0.5, 0.8, 1.3, 1.5, 1.9]


# Test 1: closed forms and the mode value

def test_cauchy_and_gaussian_closed_forms():
    x = np.linspace(-20.0, 20.0, 4001)
    assert np.max(np.abs(stable_dist.pdf(1.0, x) - 1.0 / (np.pi * (1.0 + x * x)))) < 1e-8
    gauss = np.exp(-x * x / 4.0) / (2.0 * np.sqrt(np.pi))
    assert np.max(np.abs(stable_dist.pdf(2.0, x) - gauss)) < 1e-8
    assert stable_dist.pdf(1.0, 0.0) == pytest.approx(1.0 / np.pi, abs=1e-12)
    assert stable_dist.log_pdf(1.0, 1.0) == pytest.approx(np.log(1.0 / (2.0 * np.pi)), abs=1e-12)
    assert stable_dist.log_pdf(2.0, 0.0) == pytest.approx(-np.log(2.0 * np.sqrt(np.pi)), abs=1e-12)


@pytest.mark.parametrize("alpha", [0.5, 0.8, 1.0, 1.3, 1.5, 1.9])
def test_density_at_zero(alpha):
    assert stable_dist.pdf(alpha, 0.0) == pytest.approx(special.gamma(1.0 + 1.0 / alpha) / np.pi, abs=1e-8)


@pytest.mark.parametrize("alpha", [0.8, 1.5])
def test_density_near_zero_matches_quadrature(alpha):
    dist = StableDist(alpha)
    assert dist.pdf(1e-3) == pytest.approx(dist.pdf(0.0), rel=1e-5)


# Test 2: symmetry, normalization, CDF shape

@pytest.mark.parametrize("alpha", [0.8, 1.5])
def test_symmetry_and_cdf(alpha):
    dist = StableDist(alpha)
    x = np.array([0.3, 1.7, 6.0])
    np.testing.assert_allclose(dist.pdf(x), dist.pdf(-x), rtol=1e-10)
    np.testing.assert_allclose(dist.cdf(x) + dist.cdf(-x), 1.0, atol=1e-10)
    assert dist.cdf(0.0) == 0.5
    values = dist.cdf(np.linspace(-10.0, 10.0, 41))
    assert np.all(np.diff(values) >= -1e-12)


@pytest.mark.parametrize("alpha", [0.8, 1.5])
def test_density_integrates_to_one(alpha):
    dist = StableDist(alpha)
    assert dist.expect("one").value == pytest.approx(1.0, abs=1e-7)


# Test 3: tail branch continuity

@pytest.mark.parametrize("alpha", [0.7, 1.5])
def test_tail_series_meets_quadrature_at_crossover(alpha):
    crossover = 10.0 if alpha > 1 else 5.0
    inner = StableDist(alpha, QuadratureConfig(tail_crossover=1e3))
    outer = StableDist(alpha, QuadratureConfig(tail_crossover=crossover - 1.0))
    x = crossover
    assert outer.log_pdf(x) == pytest.approx(inner.log_pdf(x), abs=1e-6)
    assert outer.dlogf_dx(x) == pytest.approx(inner.dlogf_dx(x), abs=1e-5)


def test_log_pdf_far_tail_is_finite():
    value = stable_dist.log_pdf(1.5, 1e12)
    assert np.isfinite(value)
    # f(x) ~ c x^(-alpha-1)
    coef = special.gamma(1.5) * np.sin(np.pi * 0.75) / np.pi
    assert value == pytest.approx(np.log(1.5 * coef) - 2.5 * np.log(1e12), abs=1e-6)


# Test 4: scores

@pytest.mark.parametrize("alpha", [0.8, 1.5])
def test_x_score_matches_finite_difference(alpha):
    dist = StableDist(alpha)
    h = 1e-5
    for x in (0.4, 2.5):
        numeric = (dist.log_pdf(x + h) - dist.log_pdf(x - h)) / (2.0 * h)
        assert dist.dlogf_dx(x) == pytest.approx(numeric, rel=1e-4, abs=1e-7)


@pytest.mark.parametrize("alpha", [0.8, 1.5])
def test_alpha_score_matches_finite_difference(alpha):
    h = 1e-4
    for x in (0.0, 0.7, 3.0):
        numeric = (stable_dist.log_pdf(alpha + h, x) - stable_dist.log_pdf(alpha - h, x)) / (2.0 * h)
        assert stable_dist.dlogf_dalpha(alpha, x) == pytest.approx(numeric, rel=1e-3, abs=1e-6)


def test_score_means_vanish():
    dist = StableDist(1.5)
    assert dist.expect("score_x").value == pytest.approx(0.0, abs=1e-8)
    assert dist.expect("scale_score").value == pytest.approx(0.0, abs=1e-6)
    assert dist.expect("alpha_score").value == pytest.approx(0.0, abs=1e-6)


def test_cauchy_fisher_constants():
    dist = StableDist(1.0)
    shift = EULER - 1.0 + np.log(2.0)
    assert dist.expect("score_x_sq").value == pytest.approx(0.5, abs=1e-6)
    assert dist.expect("scale_score_sq").value == pytest.approx(0.5, abs=1e-6)
    assert dist.expect("cross_score").value == pytest.approx(shift / 2.0, abs=1e-6)
    assert dist.expect("alpha_score_sq").value == pytest.approx(shift ** 2 / 2.0 + np.pi ** 2 / 12.0, abs=1e-6)


def test_alpha_score_rejected_at_gaussian():
    with pytest.raises(DomainError):
        stable_dist.dlogf_dalpha(2.0, 0.5)


# Test 5: vectorized table agrees with the reference path

@pytest.mark.parametrize("alpha", [0.6, 1.2, 1.7])
def test_table_matches_reference(alpha):
    table = get_table(alpha)
    dist = StableDist(alpha)
    x = np.array([-7.3, -1.1, 0.0, 0.25, 2.0, 11.0, 40.0])
    np.testing.assert_allclose(table.log_pdf(x), dist.log_pdf(x), atol=1e-6)
    np.testing.assert_allclose(table.dlogf_dx(x), dist.dlogf_dx(x), atol=1e-5)
    np.testing.assert_allclose(table.dlogf_dalpha(x), dist.dlogf_dalpha(x), atol=1e-5)
    np.testing.assert_allclose(table.cdf(x), dist.cdf(x), atol=1e-8)


def test_table_scalar_in_scalar_out():
    assert isinstance(get_table(1.5).log_pdf(0.3), float)


# Test 6: quantile

@pytest.mark.parametrize("alpha", [0.8, 1.0, 1.5, 2.0])
def test_quantile_inverts_cdf(alpha):
    dist = StableDist(alpha)
    for r in (0.01, 0.3, 0.5, 0.9, 0.999):
        assert dist.cdf(dist.quantile(r)) == pytest.approx(r, abs=1e-10)


def test_quantile_domain():
    with pytest.raises(DomainError):
        stable_dist.quantile(1.5, 1.0)
    with pytest.raises(DomainError):
        stable_dist.quantile(1.5, 0.0)


def test_quantile_is_a_bracketed_root(mocker):
    brentq = mocker.spy(stable_dist.optimize, "brentq")
    dist = StableDist(1.3)
    x = dist.quantile(0.95)
    assert brentq.call_count == 1
    _, lo, hi = brentq.call_args.args
    assert lo <= x <= hi
    assert dist.quantile(0.05) == pytest.approx(-x, abs=1e-12)


# Test 7: sampler and validation

@pytest.mark.parametrize("alpha", [0.8, 1.0, 1.5])
def test_sampler_matches_cdf(alpha):
    draws = stable_dist.sample(alpha, 20000, seed=3)
    table = get_table(alpha)
    result = stats.kstest(draws, table.cdf)
    assert result.pvalue > 0.001


@pytest.mark.slow
@pytest.mark.parametrize("alpha", [0.8, 1.0, 1.5])
@pytest.mark.parametrize("seed", range(5))
def test_sampler_ks_distance_at_full_size(alpha, seed):
    draws = stable_dist.sample(alpha, 100_000, seed=seed)
    result = stats.kstest(draws, get_table(alpha).cdf)
    assert result.statistic < stats.kstwo.ppf(0.99, draws.size)


def test_sampler_is_deterministic():
    np.testing.assert_array_equal(stable_dist.sample(1.3, 50, seed=9), stable_dist.sample(1.3, 50, seed=9))


@pytest.mark.parametrize("bad", [0.0, -1.0, 2.5, np.nan])
def test_invalid_alpha(bad):
    with pytest.raises(ParameterError):
        StableDist(bad)


def test_invalid_quadrature_config():
    with pytest.raises(ParameterError):
        QuadratureConfig(abs_tol=0.0)
    with pytest.raises(ParameterError):
        QuadratureConfig(tail_crossover=-1.0)


def test_non_integrable_functional():
    with pytest.raises(DomainError):
        stable_dist.expect(1.5, "abs_power", p=1.6)


def test_unknown_functional():
    with pytest.raises(ParameterError):
        stable_dist.expect(1.5, "nope")


def test_quadrature_failure_carries_tolerance(mocker):
    mocker.patch.object(stable_dist.integrate, "quad", return_value=(np.nan, 1.0))
    with pytest.raises(QuadratureError) as info:
        StableDist(1.5).pdf(0.7)
    assert info.value.tolerance > 0
