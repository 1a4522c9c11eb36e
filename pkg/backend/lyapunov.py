"""
Top Lyapunov Exponent
gamma = E log a(eta) with a(u) = phi_plus (u+)^2 + phi_minus (u-)^2 + psi, its
standard error and the stationary / explosive / near-critical classification
"""

import logging
from dataclasses import dataclass
from typing import TYPE_CHECKING, Union

import numpy as np

from backend import inference
from backend.exceptions import DegenerateError, DomainError, ParameterError
from backend.sagarch_model import ParamVector, ReturnSeries, as_series
from backend.sagarch_model import filter as volatility_filter
from backend.stable_dist import DEFAULT_QUADRATURE, QuadratureConfig, StableDist, functional

if TYPE_CHECKING:
    from backend.mle import FitResult

logger = logging.getLogger(__name__)

KINDS = ("int", "res")
REGIMES = ("stationary", "explosive", "near_critical")
# |gamma_hat| below this many standard errors is reported as near-critical
CRITICAL_BAND = 2.0


@dataclass(frozen=True)
class LyapunovEstimate:
    """gamma_hat with sigma_u_hat = sd of log a(eta) and the implied regime"""

    gamma_hat: float
    kind: str
    sigma_u_hat: float
    regime: str
    n: int

    @property
    def standard_error(self) -> float:
        return self.sigma_u_hat / np.sqrt(self.n) if self.n > 0 else float("nan")

    def as_dict(self) -> dict:
        return {
            "gamma_hat": self.gamma_hat,
            "kind": self.kind,
            "sigma_u_hat": self.sigma_u_hat,
            "regime": self.regime,
            "standard_error": self.standard_error,
        }


def classify(gamma: float, sigma_u: float, n: int) -> str:
    if gamma == 0.0 or abs(gamma) < CRITICAL_BAND * sigma_u / np.sqrt(max(n, 1)):
        return "near_critical"
    return "stationary" if gamma < 0.0 else "explosive"


def _log_a_moments(theta: ParamVector, kind: str, y: ReturnSeries, quadrature: QuadratureConfig):
    coef = dict(phi_plus=theta.phi_plus, phi_minus=theta.phi_minus, psi=theta.psi)
    if kind == "int":
        dist = StableDist(theta.alpha, quadrature)
        first = dist.expect("log_a", **coef).value
        second = dist.expect("log_a_sq", **coef).value
        return first, second
    eta = volatility_filter(theta, y).residuals
    with np.errstate(divide="ignore"):
        log_a = functional(theta.alpha, "log_a", quadrature, **coef)(eta)
    if not np.all(np.isfinite(log_a)):
        raise DomainError("log a(eta_hat) is not finite for some residual (psi_hat = 0 with eta_hat = 0)")
    return float(np.mean(log_a)), float(np.mean(log_a * log_a))


def estimate_from_theta(theta: ParamVector, y: Union[ReturnSeries, np.ndarray], kind: str = "res",
                        quadrature: QuadratureConfig = DEFAULT_QUADRATURE) -> LyapunovEstimate:
    """
    gamma^int = integral of log a(u) f_alpha(u) du, gamma^res = mean of log a(eta_hat_t);
    sigma_u^2 is the matching second moment minus gamma^2
    """
    if kind not in KINDS:
        raise ParameterError(f"kind must be one of {KINDS}, got {kind!r}")
    y = as_series(y)
    if theta.phi_plus == 0.0 and theta.phi_minus == 0.0:
        if theta.psi == 0.0:
            raise DegenerateError("gamma is undefined when phi_plus = phi_minus = psi = 0")
        gamma = float(np.log(theta.psi))
        return LyapunovEstimate(gamma, kind, 0.0, classify(gamma, 0.0, y.n), y.n)

    first, second = _log_a_moments(theta, kind, y, quadrature)
    sigma_u = float(np.sqrt(max(second - first * first, 0.0)))
    regime = classify(first, sigma_u, y.n)
    logger.debug(f"gamma^{kind} = {first:.6f} (sigma_u = {sigma_u:.4f}, regime {regime})")
    return LyapunovEstimate(first, kind, sigma_u, regime, y.n)


def gamma_hat(kind: str, fit: "FitResult", y: Union[ReturnSeries, np.ndarray],
              quadrature: QuadratureConfig = DEFAULT_QUADRATURE) -> LyapunovEstimate:
    """Lyapunov exponent estimate at a fitted theta_hat (res kind recommended)"""
    return estimate_from_theta(fit.theta_hat, y, kind, quadrature)


def gamma_closed_form_cauchy(phi_plus: float, phi_minus: float, psi: float) -> float:
    """Exact gamma at alpha = 1: log[(sqrt(phi_plus) + sqrt(psi)) (sqrt(phi_minus) + sqrt(psi))]"""
    values = np.array([phi_plus, phi_minus, psi], dtype=float)
    if not np.all(np.isfinite(values)) or np.any(values < 0.0):
        raise DomainError("Cauchy closed form needs finite nonnegative coefficients")
    if not np.any(values > 0.0):
        raise DomainError("Cauchy closed form is undefined when all coefficients are zero")
    root_psi = np.sqrt(psi)
    with np.errstate(divide="ignore"):
        return float(np.log((np.sqrt(phi_plus) + root_psi) * (np.sqrt(phi_minus) + root_psi)))


# ============================================
# ASYMPTOTIC VARIANCE OF GAMMA_HAT (REPORTING)
# ============================================

def gamma_asymptotic_variance(fit: "FitResult", y: Union[ReturnSeries, np.ndarray], kind: str = "res",
                              quadrature: QuadratureConfig = DEFAULT_QUADRATURE) -> float:
    """
    Limit variance of sqrt(n)(gamma_hat - gamma). Stationary branch:
    sigma_u^2 + a1' Sigma^-1 a2 - 4 (1 - nu_1)^2 / c1; explosive branch: sigma_u^2.
    Not used by the test decisions, which rely on sigma_u_hat alone
    """
    y = as_series(y)
    theta = fit.theta_hat
    base = estimate_from_theta(theta, y, kind, quadrature)
    sigma_u2 = base.sigma_u_hat ** 2
    if base.gamma_hat >= 0.0:
        return sigma_u2

    eta = volatility_filter(theta, y).residuals if kind == "res" else None
    coef = dict(phi_plus=theta.phi_plus, phi_minus=theta.phi_minus, psi=theta.psi)

    def moment(name: str, **params) -> float:
        return inference.eta_moment(kind, theta.alpha, name, eta, quadrature, **params)

    factors = inference.eta_factors(kind, theta.alpha, eta, quadrature)
    nu1, _ = inference.nu_moments(kind, theta, eta, quadrature)
    nu_plus = moment("a_moment", plus_power=1, **coef)
    nu_minus = moment("a_moment", minus_power=1, **coef)
    # c_star = E[u (1 + eta f'/f)], c_tilde = E[u d_alpha log f] with u = log a - gamma
    c_star = moment("log_a_scale_score", **coef) - base.gamma_hat * moment("scale_score")
    c_tilde = moment("log_a_alpha_score", **coef) - base.gamma_hat * moment("alpha_score")

    ratio = 2.0 * factors.c2 / factors.c1
    a1 = np.array([0.0, -nu_plus, -nu_minus, -nu1 / theta.psi, ratio * (1.0 - nu1 + c_star) - 2.0 * c_tilde])
    a2 = np.array([0.0, -nu_plus, -nu_minus, -nu1 / theta.psi, ratio * (1.0 - nu1)])

    sigma = inference.sigma_hat(kind, fit, y, quadrature)
    sigma_inv, _, _ = inference.inverse(sigma)
    variance = sigma_u2 + float(a1 @ sigma_inv @ a2) - 4.0 * (1.0 - nu1) ** 2 / factors.c1
    if variance < 0.0:
        logger.warning(f"Estimated gamma variance is negative ({variance:.4g}); reporting sigma_u^2 instead")
        return sigma_u2
    return variance
