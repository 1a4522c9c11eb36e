"""Information matrices, the universal estimator and ASDs"""

import numpy as np
import pytest

from backend import inference
from backend.exceptions import DegenerateError, DomainError, ParameterError
from backend.inference import InfoMatrix
from backend.mle import FitResult
from backend.sagarch_model import PARAM_NAMES, ParamVector, simulate
from data.designs import get_design

EULER = np.euler_gamma


def _fit_at(theta: ParamVector, n: int) -> FitResult:
    return FitResult(
        theta_hat=theta, loglik=0.0, converged=True, iterations=0, gradient_norm=0.0,
        regime_estimate=None, n=n, mode="free", aic=0.0, method="fixed",
    )


# eta factors

def test_cauchy_eta_factors():
    factors = inference.eta_factors("int", 1.0)
    shift = EULER - 1.0 + np.log(2.0)
    assert factors.c1 == pytest.approx(0.5, abs=1e-6)
    assert factors.c2 == pytest.approx(shift / 2.0, abs=1e-6)
    assert factors.c3 == pytest.approx(shift ** 2 / 2.0 + np.pi ** 2 / 12.0, abs=1e-6)
    assert factors.kind == "int"


def test_residual_moment_is_a_sample_average(rng):
    eta = rng.standard_normal(50)
    assert inference.eta_moment("res", 1.5, "one", eta) == pytest.approx(1.0)
    with pytest.raises(ParameterError):
        inference.eta_moment("res", 1.5, "one")


def test_recommended_kind():
    assert inference.recommended_kind(0.7) == "int"
    assert inference.recommended_kind(1.0) == "int"
    assert inference.recommended_kind(1.4) == "res"


# matrix algebra

def test_asd_of_identity():
    report = inference.asd(InfoMatrix(np.eye(5), "sigma_int", PARAM_NAMES), 100)
    np.testing.assert_allclose(report.as_array(), 0.1)
    assert not report.pseudo_inverse
    scaled = inference.asd(InfoMatrix(4.0 * np.eye(5), "sigma_int", PARAM_NAMES), 100)
    np.testing.assert_allclose(scaled.as_array(), 0.05)


def test_info_matrix_validation():
    with pytest.raises(ParameterError):
        InfoMatrix(np.eye(4), "sigma_int", PARAM_NAMES)
    with pytest.raises(ParameterError):
        InfoMatrix(np.eye(5), "other", PARAM_NAMES)
    lopsided = np.eye(5)
    lopsided[0, 1] = 1.0
    np.testing.assert_array_equal(InfoMatrix(lopsided, "sigma_int", PARAM_NAMES).entries[1, 0], 0.5)


def test_ill_conditioned_matrix_uses_pseudo_inverse():
    entries = np.diag([1.0, 1e-14, 1.0, 1.0, 1.0])
    report = inference.asd(InfoMatrix(entries, "sigma_res", PARAM_NAMES), 100)
    assert report.pseudo_inverse
    assert report.condition > inference.PINV_CONDITION
    assert report.asd["phi_plus"] == 0.0
    assert report.asd["omega"] == pytest.approx(0.1)


def test_asd_rejects_bad_n():
    with pytest.raises(ParameterError):
        inference.asd(InfoMatrix(np.eye(5), "sigma_int", PARAM_NAMES), 0)


def test_schur_complement_of_block_diagonal(rng):
    a = rng.standard_normal((4, 4))
    block = a @ a.T + np.eye(4)
    entries = np.zeros((5, 5))
    entries[0, 0] = 3.0
    entries[1:, 1:] = block
    result = inference.schur_complement(InfoMatrix(entries, "sigma_res", PARAM_NAMES))
    np.testing.assert_allclose(result.entries, block, rtol=1e-12)
    assert result.names == inference.VARTHETA_NAMES
    assert result.kind == "universal"


def test_schur_complement_needs_positive_omega_block():
    entries = np.eye(5)
    entries[0, 0] = 0.0
    with pytest.raises(DegenerateError):
        inference.schur_complement(InfoMatrix(entries, "sigma_res", PARAM_NAMES))


# nu building blocks

def test_nu_moments_without_asymmetry_terms():
    theta = ParamVector(0.1, 0.0, 0.0, 0.7, 1.5)
    assert inference.nu_moments("int", theta) == (1.0, 1.0)


def test_nu_moments_need_positive_psi():
    with pytest.raises(DomainError):
        inference.nu_moments("int", ParamVector(0.1, 0.2, 0.2, 0.0, 1.5))


def test_nu_moments_are_ordered(explosive_theta):
    nu1, nu2 = inference.nu_moments("int", explosive_theta)
    assert 0.0 < nu2 < nu1 < 1.0


def test_population_upsilon_is_positive_definite(explosive_theta):
    upsilon = inference.population_upsilon(explosive_theta)
    assert upsilon.names == inference.VARTHETA_NAMES
    np.testing.assert_allclose(upsilon.entries, upsilon.entries.T)
    assert np.linalg.eigvalsh(upsilon.entries)[0] > 0.0


def test_upsilon_hat_on_explosive_path(explosive_theta):
    path = simulate(explosive_theta, 500, seed=11, burn_in=0)
    upsilon = inference.upsilon_hat("res", _fit_at(explosive_theta, 500), path.series)
    assert upsilon.kind == "upsilon_res"
    assert np.linalg.eigvalsh(upsilon.entries)[0] > 0.0


# estimates at a fit

def test_sigma_hat_is_symmetric_and_positive(stationary_fit, stationary_path):
    sigma = inference.sigma_hat("res", stationary_fit, stationary_path.series)
    assert sigma.kind == "sigma_res"
    assert sigma.selected is None
    np.testing.assert_array_equal(sigma.entries, sigma.entries.T)
    assert np.linalg.eigvalsh(sigma.entries)[0] > 0.0


def test_auto_kind_is_recorded(stationary_theta, stationary_path):
    sigma = inference.sigma_hat("auto", _fit_at(stationary_theta, 1000), stationary_path.series)
    assert sigma.kind == "sigma_res"
    assert sigma.selected == "res"
    report = inference.asd(sigma, 1000)
    assert report.selected == "res"


def test_unknown_kind(stationary_fit, stationary_path):
    with pytest.raises(ParameterError):
        inference.sigma_hat("other", stationary_fit, stationary_path.series)


def test_sigma_needs_enough_observations(stationary_theta, stationary_path):
    with pytest.raises(ParameterError):
        inference.sigma_hat("res", _fit_at(stationary_theta, 10), stationary_path.series.values[:11])


def test_universal_variance_shape(stationary_fit, stationary_path):
    universal = inference.universal_variance(stationary_fit, stationary_path.series)
    assert universal.entries.shape == (4, 4)
    report = inference.asd(universal, stationary_fit.n)
    assert set(report.asd) == set(inference.VARTHETA_NAMES)
    assert all(value > 0.0 for value in report.asd.values())


@pytest.mark.slow
def test_integral_and_residual_sigma_agree_at_n_5000(stationary_theta):
    y = simulate(stationary_theta, 5000, seed=41).series
    fit = _fit_at(stationary_theta, 5000)
    sigma_int = inference.sigma_hat("int", fit, y).entries
    sigma_res = inference.sigma_hat("res", fit, y).entries
    np.testing.assert_allclose(sigma_res, sigma_int, rtol=0.05, atol=0.05 * np.abs(sigma_int).max())


@pytest.mark.slow
def test_integral_and_residual_nu_agree_on_explosive_path():
    theta = get_design("explosive_a10").theta
    path = simulate(theta, 5000, seed=43, burn_in=0)
    assert not path.truncated
    fit = _fit_at(theta, 5000)
    nu_int = inference.nu_hat("int", fit, path.series)
    nu_res = inference.nu_hat("res", fit, path.series)
    np.testing.assert_allclose(nu_res, nu_int, rtol=0.05)
