"""
sAGARCH(1,1) Model
Parameter and series types, path simulation and the volatility filter with derivatives

    sigma_t^2 = omega + phi_plus (y_{t-1}^+)^2 + phi_minus (y_{t-1}^-)^2 + psi sigma_{t-1}^2
    y_t = sigma_t eta_t,  eta_t ~ S(alpha, 0, 1, 0)
"""

import logging
from dataclasses import dataclass, field
from typing import Callable, Optional, Sequence, Union

import numpy as np
from scipy.signal import lfilter

from backend.exceptions import ParameterError
from backend.stable_dist import SeedLike, StableExponent, draw

logger = logging.getLogger(__name__)

PARAM_NAMES = ("omega", "phi_plus", "phi_minus", "psi", "alpha")
SCALE_HINTS = ("raw", "percent")

# plain-domain filter switches to the log domain past this magnitude
LOG_DOMAIN_GUARD = 1e250

InnovationSampler = Callable[[np.random.Generator, int], np.ndarray]


# ============================================
# DOMAIN TYPES
# ============================================

@dataclass(frozen=True)
class ParamVector:
    """
    theta = (omega, phi_plus, phi_minus, psi, alpha)
    Sub-vectors: theta_tilde = (omega, phi+, phi-, psi), vartheta = (phi+, phi-, psi, alpha),
    vartheta_tilde = (phi+, phi-, psi)
    """

    omega: float
    phi_plus: float
    phi_minus: float
    psi: float
    alpha: float

    def __post_init__(self):
        for name in PARAM_NAMES:
            value = float(getattr(self, name))
            if not np.isfinite(value):
                raise ParameterError(f"{name} must be finite, got {value!r}")
            object.__setattr__(self, name, value)
        if not self.omega > 0.0:
            raise ParameterError(f"omega must be positive, got {self.omega}")
        if min(self.phi_plus, self.phi_minus, self.psi) < 0.0:
            raise ParameterError("phi_plus, phi_minus and psi must be nonnegative")
        StableExponent(self.alpha)

    @classmethod
    def from_array(cls, values: Sequence[float]) -> "ParamVector":
        values = np.asarray(values, dtype=float).ravel()
        if values.size != 5:
            raise ParameterError(f"theta needs 5 entries, got {values.size}")
        return cls(*values.tolist())

    def as_array(self) -> np.ndarray:
        return np.array([self.omega, self.phi_plus, self.phi_minus, self.psi, self.alpha])

    def as_dict(self) -> dict:
        return dict(zip(PARAM_NAMES, self.as_array().tolist()))

    @property
    def theta_tilde(self) -> np.ndarray:
        return self.as_array()[:4]

    @property
    def vartheta(self) -> np.ndarray:
        return self.as_array()[1:]

    @property
    def vartheta_tilde(self) -> np.ndarray:
        return self.as_array()[1:4]

    def swapped(self) -> "ParamVector":
        """phi_plus <-> phi_minus (the parameter matching negated data)"""
        return ParamVector(self.omega, self.phi_minus, self.phi_plus, self.psi, self.alpha)

    def rescaled(self, c: float) -> "ParamVector":
        """Parameter of the series y / sqrt(c)"""
        if not c > 0:
            raise ParameterError("rescaling constant must be positive")
        return ParamVector(self.omega / c, self.phi_plus, self.phi_minus, self.psi, self.alpha)


@dataclass(frozen=True, eq=False)
class ReturnSeries:
    """Observations y_0..y_n; returns are taken as given (no log-return transform)"""

    values: np.ndarray
    scale_hint: str = "raw"

    def __post_init__(self):
        values = np.asarray(self.values, dtype=float)
        if values.ndim != 1:
            raise ParameterError("return series must be one-dimensional")
        if values.size < 2:
            raise ParameterError(f"return series needs at least 2 observations, got {values.size}")
        if not np.all(np.isfinite(values)):
            raise ParameterError("return series contains non-finite values")
        if self.scale_hint not in SCALE_HINTS:
            raise ParameterError(f"scale_hint must be one of {SCALE_HINTS}")
        values = values.copy()
        values.setflags(write=False)
        object.__setattr__(self, "values", values)

    @property
    def n(self) -> int:
        """Number of usable observations (y_1..y_n)"""
        return self.values.size - 1

    def __len__(self) -> int:
        return self.values.size

    def negated(self) -> "ReturnSeries":
        return ReturnSeries(-self.values, self.scale_hint)

    def scaled(self, c: float) -> "ReturnSeries":
        return ReturnSeries(c * self.values, self.scale_hint)


@dataclass(frozen=True, eq=False)
class FilterOutput:
    """
    Filtered volatility carried as log sigma~_t^2 plus relative derivatives
    (d sigma~_t^2 / d theta_tilde) / sigma~_t^2, t = 1..n, so explosive paths stay finite
    """

    log_sigma2: np.ndarray
    rel_dsigma2: np.ndarray
    residuals: np.ndarray
    log_domain: bool = False

    @property
    def sigma2(self) -> np.ndarray:
        with np.errstate(over="ignore"):
            return np.exp(self.log_sigma2)

    @property
    def dsigma2(self) -> np.ndarray:
        with np.errstate(over="ignore", invalid="ignore"):
            return self.rel_dsigma2 * self.sigma2[:, None]


@dataclass(frozen=True, eq=False)
class SimulatedPath:
    """Simulated series with the innovations and volatilities that produced it"""

    series: ReturnSeries
    eta: np.ndarray
    sigma2: np.ndarray
    truncated: bool = False
    requested_n: int = 0
    meta: dict = field(default_factory=dict)


def as_series(y: Union[ReturnSeries, Sequence[float], np.ndarray]) -> ReturnSeries:
    return y if isinstance(y, ReturnSeries) else ReturnSeries(np.asarray(y, dtype=float))


# ============================================
# SIMULATION
# ============================================

def simulate(theta: ParamVector, n: int, seed: SeedLike = None, burn_in: int = 500,
             innovations: Optional[InnovationSampler] = None) -> SimulatedPath:
    """
    Generate y_0..y_n after discarding burn_in points; the recursion starts at
    sigma_0^2 = omega, y_0 = 0. Explosive paths that overflow are truncated and flagged.
    innovations(rng, size) replaces the stable sampler (Student-t alternatives)
    """
    if int(n) != n or n < 1:
        raise ParameterError(f"n must be a positive integer, got {n!r}")
    if int(burn_in) != burn_in or burn_in < 0:
        raise ParameterError(f"burn_in must be a nonnegative integer, got {burn_in!r}")
    n, burn_in = int(n), int(burn_in)

    rng = np.random.default_rng(seed)
    total = burn_in + n + 1
    if innovations is None:
        eta = draw(rng, theta.alpha, total)
    else:
        eta = np.asarray(innovations(rng, total), dtype=float)
        if eta.shape != (total,):
            raise ParameterError(f"innovation sampler returned shape {eta.shape}, expected ({total},)")
    eta[0] = 0.0

    sigma2 = np.empty(total)
    y = np.empty(total)
    sigma2[0], y[0] = theta.omega, 0.0
    stop = total
    with np.errstate(over="ignore", invalid="ignore"):
        for t in range(1, total):
            prev = y[t - 1]
            shock = theta.phi_plus * prev * prev if prev > 0.0 else theta.phi_minus * prev * prev
            sigma2[t] = theta.omega + shock + theta.psi * sigma2[t - 1]
            y[t] = np.sqrt(sigma2[t]) * eta[t]
            if not (np.isfinite(sigma2[t]) and np.isfinite(y[t])):
                stop = t
                break

    truncated = stop < total
    start = min(burn_in, max(stop - 2, 0))
    if truncated:
        logger.warning(
            f"Simulated path overflowed at step {stop} of {total}; returning {stop - start} points"
        )
    return SimulatedPath(
        series=ReturnSeries(y[start:stop]),
        eta=eta[start:stop].copy(),
        sigma2=sigma2[start:stop].copy(),
        truncated=truncated,
        requested_n=n,
        meta={"burn_in": burn_in, "start_index": start},
    )


# ============================================
# VOLATILITY FILTER
# ============================================

def filter(theta: ParamVector, y: Union[ReturnSeries, np.ndarray], sigma2_init: float = 0.0) -> FilterOutput:
    """
    sigma~_t^2(theta), t = 1..n, from (y_0, sigma~_0^2) = (y_0, sigma2_init), plus
    d sigma~_t^2 / d(omega, phi+, phi-, psi) with all derivative recursions started at 0
    """
    series = as_series(y)
    if not sigma2_init >= 0.0:
        raise ParameterError("sigma2_init must be nonnegative")

    lagged = series.values[:-1]
    current = series.values[1:]
    pos2 = np.maximum(lagged, 0.0) ** 2
    neg2 = np.minimum(lagged, 0.0) ** 2

    plain = _filter_plain(theta, pos2, neg2, sigma2_init)
    if plain is not None:
        sigma2, dsigma2 = plain
        log_sigma2 = np.log(sigma2)
        rel = dsigma2 / sigma2[:, None]
        log_domain = False
    else:
        logger.debug("Volatility filter switched to the log domain")
        log_sigma2, rel = _filter_log(theta, lagged, sigma2_init)
        log_domain = True

    residuals = current * np.exp(-0.5 * log_sigma2)
    return FilterOutput(log_sigma2=log_sigma2, rel_dsigma2=rel, residuals=residuals, log_domain=log_domain)


def _filter_plain(theta: ParamVector, pos2: np.ndarray, neg2: np.ndarray, sigma2_init: float):
    """Linear recursions through lfilter; None when magnitudes leave the guarded range"""
    psi = theta.psi
    den = [1.0, -psi]
    with np.errstate(over="ignore", invalid="ignore"):
        drive = theta.omega + theta.phi_plus * pos2 + theta.phi_minus * neg2
        sigma2, _ = lfilter([1.0], den, drive, zi=[psi * sigma2_init])
        if not np.all(np.isfinite(sigma2)) or sigma2.max() > LOG_DOMAIN_GUARD:
            return None
        prev_sigma2 = np.concatenate([[sigma2_init], sigma2[:-1]])
        inputs = np.column_stack([np.ones_like(pos2), pos2, neg2, prev_sigma2])
        dsigma2 = lfilter([1.0], den, inputs, axis=0)
        if not np.all(np.isfinite(dsigma2)) or np.abs(dsigma2).max() > LOG_DOMAIN_GUARD:
            return None
    return sigma2, dsigma2


def _filter_log(theta: ParamVector, lagged: np.ndarray, sigma2_init: float):
    """log sigma~_t^2 via logaddexp and relative derivatives r_t = q_t r_{t-1} + e_t"""
    n = lagged.size
    with np.errstate(divide="ignore"):
        log_abs = np.log(np.abs(lagged))
        log_phi_pos = np.log(theta.phi_plus)
        log_phi_neg = np.log(theta.phi_minus)
        log_psi = np.log(theta.psi)
        log_prev = np.log(sigma2_init)
    log_shock = np.where(lagged > 0.0, log_phi_pos, log_phi_neg) + 2.0 * log_abs
    log_drive = np.logaddexp(np.log(theta.omega), log_shock)
    log_pos2 = np.where(lagged > 0.0, 2.0 * log_abs, -np.inf)
    log_neg2 = np.where(lagged < 0.0, 2.0 * log_abs, -np.inf)

    log_sigma2 = np.empty(n)
    rel = np.empty((n, 4))
    r_prev = np.zeros(4)
    for t in range(n):
        current = np.logaddexp(log_drive[t], log_psi + log_prev)
        q = np.exp(log_psi + log_prev - current)
        e = np.exp(np.array([0.0, log_pos2[t], log_neg2[t], log_prev]) - current)
        r_prev = e + q * r_prev
        rel[t] = r_prev
        log_sigma2[t] = current
        log_prev = current
    return log_sigma2, rel


def residuals(theta: ParamVector, y: Union[ReturnSeries, np.ndarray], sigma2_init: float = 0.0) -> np.ndarray:
    """eta_hat_t = y_t / sigma~_t(theta), t = 1..n"""
    return filter(theta, y, sigma2_init).residuals
