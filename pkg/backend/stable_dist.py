"""
Stable Distribution Numerics
Density, CDF, quantile, scores, sampling and expectations for the standardized
symmetric stable law S(alpha, 0, 1, 0) with characteristic function exp(-|s|^alpha)
Numerical Analyst: Fourier inversion, asymptotic tail series and cached spline tables
"""

import logging
import warnings
from dataclasses import dataclass
from functools import lru_cache
from typing import Callable, Dict, Optional, Union

import numpy as np
from scipy import integrate, optimize, special
from scipy.interpolate import CubicSpline

from backend.exceptions import DomainError, ParameterError, QuadratureError

logger = logging.getLogger(__name__)

SeedLike = Union[None, int, np.random.SeedSequence, np.random.Generator]

# exp(-s**alpha) is dropped once s**alpha exceeds this
SUPPORT_LOG = 50.0
TAIL_TERMS = 80
TAIL_CANCELLATION_LIMIT = 1e8
# alpha < 1: tables stop where the inversion integral spans this many half-periods
MAX_HALF_PERIODS = 300
# quadrature warnings are tolerated when abserr stays within this factor of the target
LOOSE_FACTOR = 100.0
OSCILLATION_SPLITS = ("half_period", "none")
QUANTILE_TOL = 1e-12


# ============================================
# CONFIGURATION TYPES
# ============================================

@dataclass(frozen=True)
class StableExponent:
    """Validated stability exponent, 0 < alpha <= 2"""

    value: float

    def __post_init__(self):
        value = float(self.value)
        if not np.isfinite(value) or not 0.0 < value <= 2.0:
            raise ParameterError(f"stability exponent must lie in (0, 2], got {self.value!r}")
        object.__setattr__(self, "value", value)

    def __float__(self) -> float:
        return self.value

    @property
    def is_cauchy(self) -> bool:
        return self.value == 1.0

    @property
    def is_gaussian(self) -> bool:
        return self.value == 2.0


@dataclass(frozen=True)
class QuadratureConfig:
    """
    Tolerances and switch points for the stable-law numerics
    tail_crossover=None selects 15 * max(1, alpha), lowered for alpha < 1 where the
    tail series converges everywhere but the inversion integral gets long
    """

    abs_tol: float = 1e-12
    rel_tol: float = 1e-10
    oscillation_split: str = "half_period"
    tail_crossover: Optional[float] = None
    max_subdivisions: int = 200
    table_nodes: int = 321

    def __post_init__(self):
        if not self.abs_tol > 0 or not self.rel_tol > 0:
            raise ParameterError("quadrature tolerances must be positive")
        if self.tail_crossover is not None and not self.tail_crossover > 0:
            raise ParameterError("tail_crossover must be positive")
        if self.oscillation_split not in OSCILLATION_SPLITS:
            raise ParameterError(f"oscillation_split must be one of {OSCILLATION_SPLITS}")
        if self.max_subdivisions < 10:
            raise ParameterError("max_subdivisions must be at least 10")
        if self.table_nodes < 16:
            raise ParameterError("table_nodes must be at least 16")

    def crossover(self, alpha: float) -> float:
        """|x| beyond which the asymptotic tail series replaces quadrature"""
        if self.tail_crossover is not None:
            return float(self.tail_crossover)
        return default_crossover(alpha)


DEFAULT_QUADRATURE = QuadratureConfig()


@dataclass(frozen=True)
class QuadratureResult:
    """Integral value with its reported absolute error"""

    value: float
    abserr: float

    def __float__(self) -> float:
        return self.value

    def __add__(self, other: "QuadratureResult") -> "QuadratureResult":
        return QuadratureResult(self.value + other.value, self.abserr + other.abserr)


def default_crossover(alpha: float) -> float:
    crossover = 15.0 * max(1.0, alpha)
    if alpha < 1.0:
        crossover = min(crossover, MAX_HALF_PERIODS * np.pi / support_limit(alpha))
    return crossover


def support_limit(alpha: float) -> float:
    """Upper end of the effective support of exp(-s**alpha)"""
    return SUPPORT_LOG ** (1.0 / alpha)


def _as_alpha(alpha: Union[float, StableExponent]) -> float:
    if isinstance(alpha, StableExponent):
        return alpha.value
    return StableExponent(alpha).value


def _require_non_gaussian(alpha: float) -> None:
    if alpha >= 2.0:
        raise DomainError("the alpha-score is defined for 0 < alpha < 2 only")


# ============================================
# QUADRATURE PRIMITIVES
# ============================================

def _checked_quad(func: Callable[[float], float], a: float, b: float,
                  config: QuadratureConfig, what: str, **kwargs) -> QuadratureResult:
    """scipy quad with IntegrationWarning turned into QuadratureError when accuracy is lost"""
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always", integrate.IntegrationWarning)
        value, abserr = integrate.quad(
            func, a, b,
            epsabs=config.abs_tol,
            epsrel=config.rel_tol,
            limit=config.max_subdivisions,
            limlst=config.max_subdivisions,
            **kwargs,
        )[:2]
    target = max(config.abs_tol, config.rel_tol * abs(value))
    if not np.isfinite(value) or (caught and abserr > LOOSE_FACTOR * target):
        raise QuadratureError(f"{what} did not converge", tolerance=target, estimate=value, abserr=abserr)
    if caught:
        logger.debug(f"{what}: accepted despite warning ({caught[0].message}), abserr={abserr:.2e}")
    return QuadratureResult(float(value), float(abserr))


def _kernel(alpha: float, kind: str, s: np.ndarray) -> np.ndarray:
    """Non-oscillating factor of each inversion integrand (s-variable)"""
    e = np.exp(-s ** alpha)
    if kind == "pdf":
        return e
    if kind == "dx":
        return -s * e
    if kind == "dalpha":
        return -special.xlogy(s ** alpha, s) * e
    if kind == "cdf":
        return e / s
    raise ValueError(kind)


_WEIGHT = {"pdf": "cos", "dx": "sin", "dalpha": "cos", "cdf": "sin"}


def _fused(alpha: float, kind: str, x: float, s: np.ndarray) -> np.ndarray:
    """Full integrand including the trigonometric factor; cdf uses sin(sx)/s = x sinc"""
    sx = s * x
    if kind == "cdf":
        return np.exp(-s ** alpha) * x * np.sinc(sx / np.pi)
    trig = np.sin(sx) if _WEIGHT[kind] == "sin" else np.cos(sx)
    return _kernel(alpha, kind, s) * trig


def _head_integral(alpha: float, kind: str, x: float, upper: float,
                   config: QuadratureConfig) -> QuadratureResult:
    """Plain adaptive quadrature over [0, upper]; u = s**alpha removes the cusp when alpha < 1"""
    if alpha < 1.0:
        def integrand(u):
            s = u ** (1.0 / alpha)
            return _fused(alpha, kind, x, s) * u ** (1.0 / alpha - 1.0) / alpha

        return _checked_quad(integrand, 0.0, upper ** alpha, config, f"{kind} head integral")
    return _checked_quad(lambda s: _fused(alpha, kind, x, s), 0.0, upper, config, f"{kind} head integral")


def _fourier_integral(alpha: float, kind: str, ax: float, config: QuadratureConfig) -> QuadratureResult:
    """
    Inversion integral (without the 1/pi) at ax > 0
    First half-period by Gauss-Kronrod, the rest by QAWF (half-period cycles with
    epsilon-algorithm acceleration of the alternating partial sums)
    """
    support = support_limit(alpha)
    split = kind == "cdf" or config.oscillation_split == "half_period"
    head_end = min(np.pi / ax, support) if split else 0.0
    result = QuadratureResult(0.0, 0.0)
    if head_end > 0.0:
        result = _head_integral(alpha, kind, ax, head_end, config)
    if head_end >= support:
        return result
    tail = _checked_quad(
        lambda s: _kernel(alpha, kind, s), head_end, np.inf, config,
        f"{kind} oscillatory integral", weight=_WEIGHT[kind], wvar=ax,
    )
    return result + tail


# ============================================
# TAIL SERIES
# ============================================

def _tail_series(alpha: float, ax: np.ndarray) -> Dict[str, np.ndarray]:
    """
    Asymptotic expansion f(x) ~ (1/pi) sum (-1)^(k+1) G(k alpha+1)/k! sin(k pi alpha/2) x^(-k alpha-1)
    and its term-wise x- and alpha-derivatives plus the survival series, for ax > 0.
    alpha > 1: truncated at the first growing term; alpha < 1: convergent, summed out.
    All quantities are formed relative to the leading term so nothing underflows.
    """
    ax = np.asarray(ax, dtype=float)
    k = np.arange(1, TAIL_TERMS + 1, dtype=float)
    lx = np.log(ax)[:, None]
    logmag = (special.gammaln(k * alpha + 1.0) - special.gammaln(k + 1.0))[None, :] - k[None, :] * alpha * lx

    if alpha > 1.0:
        growing = np.diff(logmag, axis=1) > 0.0
        keep = np.concatenate(
            [np.ones((ax.size, 1), dtype=bool), np.cumsum(growing, axis=1) == 0], axis=1
        )
    else:
        keep = np.ones(logmag.shape, dtype=bool)

    rel = np.where(keep, np.exp(np.minimum(logmag - logmag[:, :1], 700.0)), 0.0)
    sign = np.where(k % 2 == 1, 1.0, -1.0)
    sin_k = np.sin(k * np.pi * alpha / 2.0)
    cos_k = np.cos(k * np.pi * alpha / 2.0)

    base = rel * (sign * sin_k)[None, :]
    lead = base.sum(axis=1)
    spread = np.max(np.abs(base), axis=1)
    if np.any(~(lead > 0.0)) or np.any(spread > TAIL_CANCELLATION_LIMIT * lead):
        worst = float(np.max(spread / np.abs(lead)))
        raise QuadratureError(
            "tail series lost precision", tolerance=1.0 / TAIL_CANCELLATION_LIMIT, estimate=worst
        )

    dx_sum = (base * -(k * alpha + 1.0)[None, :]).sum(axis=1)
    alpha_factor = (
        ((k * special.digamma(k * alpha + 1.0))[None, :] - k[None, :] * lx) * sin_k[None, :]
        + (k * np.pi / 2.0 * cos_k)[None, :]
    )
    dalpha_sum = (rel * sign[None, :] * alpha_factor).sum(axis=1)
    sf_sum = (base / (k * alpha)[None, :]).sum(axis=1)

    log_lead = logmag[:, 0]
    return {
        "log_pdf": log_lead - np.log(np.pi) - np.log(ax) + np.log(lead),
        "dlogf_dx": dx_sum / (lead * ax),
        "dlogf_dalpha": dalpha_sum / lead,
        "sf": np.exp(log_lead - np.log(np.pi)) * sf_sum,
    }


# ============================================
# CLOSED FORMS (alpha = 1 Cauchy, alpha = 2 N(0, 2))
# ============================================

def _cauchy_log_pdf(x):
    return -np.log(np.pi) - np.log1p(x * x)


def _cauchy_dlogf_dx(x):
    return -2.0 * x / (1.0 + x * x)


def _cauchy_dlogf_dalpha(x):
    z = 1.0 - 1j * np.asarray(x, dtype=float)
    return -(1.0 + np.asarray(x, dtype=float) ** 2) * np.real(((1.0 - np.euler_gamma) - np.log(z)) / z ** 2)


def _cauchy_cdf(x):
    return 0.5 + np.arctan(x) / np.pi


def _gauss_log_pdf(x):
    return -0.25 * x * x - np.log(2.0 * np.sqrt(np.pi))


def _gauss_dlogf_dx(x):
    return -0.5 * np.asarray(x, dtype=float)


def _gauss_cdf(x):
    return special.ndtr(np.asarray(x, dtype=float) / np.sqrt(2.0))


# ============================================
# VECTORIZED TABLE PATH
# ============================================

class DensityTable:
    """
    Vectorized log-density, x-score, alpha-score and CDF for one alpha
    Inside the crossover: clamped cubic splines in t = log1p(|x|) over values from one
    vector-valued Gauss-Kronrod pass; outside: the tail series
    Used wherever long residual vectors are evaluated (likelihood, scores, estimators)
    """

    def __init__(self, alpha: float, config: QuadratureConfig = DEFAULT_QUADRATURE):
        self.alpha = _as_alpha(alpha)
        self.config = config
        if self.alpha in (1.0, 2.0):
            self.crossover = 15.0 * max(1.0, self.alpha)
            return
        self.crossover = min(config.crossover(self.alpha), default_crossover(self.alpha))
        self._build()

    def _build(self):
        alpha, config = self.alpha, self.config
        t = np.linspace(0.0, np.log1p(self.crossover), config.table_nodes)
        x = np.expm1(t)
        n = x.size

        def integrand(v):
            if alpha < 1.0:
                s = v ** (1.0 / alpha)
                e = np.exp(-v) * v ** (1.0 / alpha - 1.0) / alpha
                s_alpha_log_s = v * np.log(v) / alpha if v > 0.0 else 0.0
            else:
                s = v
                e = np.exp(-s ** alpha)
                s_alpha_log_s = special.xlogy(s ** alpha, s)
            sx = s * x
            cos = np.cos(sx)
            return np.concatenate([e * cos, -s_alpha_log_s * e * cos, e * np.sinc(sx / np.pi)])

        upper = SUPPORT_LOG if alpha < 1.0 else support_limit(alpha)
        values, err, info = integrate.quad_vec(
            integrand, 0.0, upper,
            epsabs=config.abs_tol * 1e-2,
            epsrel=config.rel_tol,
            norm="max",
            limit=50 * config.max_subdivisions,
            full_output=True,
        )
        values = values / np.pi
        if info.status != 0 and err > LOOSE_FACTOR * config.abs_tol:
            raise QuadratureError(
                f"density table for alpha={alpha:.6g} did not converge",
                tolerance=config.abs_tol, estimate=float(values[0]), abserr=float(err),
            )

        f, fa, cdf_over_x = values[:n], values[n:2 * n], values[2 * n:]
        if np.any(f <= 0.0):
            bad = float(x[np.argmin(f)])
            raise QuadratureError(
                f"non-positive density in table for alpha={alpha:.6g} at x={bad:.6g}",
                tolerance=config.abs_tol, estimate=float(np.min(f)), abserr=float(err),
            )

        clamped = ((1, 0.0), "not-a-knot")
        self._log_pdf = CubicSpline(t, np.log(f), bc_type=clamped)
        self._dlog_pdf = self._log_pdf.derivative()
        self._dlogf_dalpha = CubicSpline(t, fa / f, bc_type=clamped)
        self._cdf_over_x = CubicSpline(t, cdf_over_x, bc_type=clamped)
        logger.debug(f"Built density table alpha={alpha:.6g} crossover={self.crossover:.4g} abserr={err:.2e}")

    def _split(self, x, inner_fn, tail_fn):
        x = np.asarray(x, dtype=float)
        flat = np.atleast_1d(x).ravel()
        ax = np.abs(flat)
        inner = ax <= self.crossover
        out = np.empty_like(flat)
        if inner.any():
            out[inner] = inner_fn(flat[inner], ax[inner])
        if not inner.all():
            out[~inner] = tail_fn(flat[~inner], ax[~inner])
        out = out.reshape(x.shape)
        return float(out) if out.ndim == 0 else out

    def log_pdf(self, x):
        if self.alpha == 1.0:
            return _cauchy_log_pdf(np.asarray(x, dtype=float))
        if self.alpha == 2.0:
            return _gauss_log_pdf(np.asarray(x, dtype=float))
        return self._split(
            x,
            lambda v, a: self._log_pdf(np.log1p(a)),
            lambda v, a: _tail_series(self.alpha, a)["log_pdf"],
        )

    def pdf(self, x):
        return np.exp(self.log_pdf(x))

    def dlogf_dx(self, x):
        if self.alpha == 1.0:
            return _cauchy_dlogf_dx(np.asarray(x, dtype=float))
        if self.alpha == 2.0:
            return _gauss_dlogf_dx(x)
        return self._split(
            x,
            lambda v, a: np.sign(v) * self._dlog_pdf(np.log1p(a)) / (1.0 + a),
            lambda v, a: np.sign(v) * _tail_series(self.alpha, a)["dlogf_dx"],
        )

    def dlogf_dalpha(self, x):
        _require_non_gaussian(self.alpha)
        if self.alpha == 1.0:
            return _cauchy_dlogf_dalpha(x)
        return self._split(
            x,
            lambda v, a: self._dlogf_dalpha(np.log1p(a)),
            lambda v, a: _tail_series(self.alpha, a)["dlogf_dalpha"],
        )

    def cdf(self, x):
        if self.alpha == 1.0:
            return _cauchy_cdf(np.asarray(x, dtype=float))
        if self.alpha == 2.0:
            return _gauss_cdf(x)

        def tail(v, a):
            sf = _tail_series(self.alpha, a)["sf"]
            return np.where(v > 0.0, 1.0 - sf, sf)

        return self._split(x, lambda v, a: 0.5 + v * self._cdf_over_x(np.log1p(a)), tail)


@lru_cache(maxsize=64)
def get_table(alpha: float, config: QuadratureConfig = DEFAULT_QUADRATURE) -> DensityTable:
    """Cached DensityTable per (alpha, config)"""
    return DensityTable(float(alpha), config)


# ============================================
# EXPECTATION FUNCTIONALS
# ============================================

Functional = Callable[[np.ndarray], np.ndarray]
_FUNCTIONALS: Dict[str, Callable[..., Functional]] = {}


def register_functional(name: str):
    """Decorator adding a builder (table, **params) -> vectorized g(u) to the registry"""

    def decorator(builder):
        _FUNCTIONALS[name] = builder
        return builder

    return decorator


def registered_functionals() -> list:
    return sorted(_FUNCTIONALS)


def volatility_multiplier(u, phi_plus: float, phi_minus: float, psi: float):
    """a(u) = phi_plus (u+)^2 + phi_minus (u-)^2 + psi"""
    u = np.asarray(u, dtype=float)
    pos = np.maximum(u, 0.0)
    neg = np.minimum(u, 0.0)
    return phi_plus * pos * pos + phi_minus * neg * neg + psi


def _check_multiplier(phi_plus: float, phi_minus: float, psi: float, needs_positive: bool) -> None:
    if min(phi_plus, phi_minus, psi) < 0.0:
        raise DomainError("volatility coefficients must be nonnegative")
    if psi > 0.0:
        return
    if needs_positive:
        raise DomainError("a(u) vanishes at u = 0 when psi = 0")
    if phi_plus == 0.0 or phi_minus == 0.0:
        raise DomainError("log a(u) is undefined on a half-line when psi = 0 and one phi is 0")


@register_functional("one")
def _one(table: DensityTable) -> Functional:
    return lambda u: np.ones_like(np.asarray(u, dtype=float))


@register_functional("score_x")
def _score_x(table: DensityTable) -> Functional:
    return table.dlogf_dx


@register_functional("score_x_sq")
def _score_x_sq(table: DensityTable) -> Functional:
    return lambda u: table.dlogf_dx(u) ** 2


@register_functional("scale_score")
def _scale_score(table: DensityTable) -> Functional:
    return lambda u: 1.0 + np.asarray(u) * table.dlogf_dx(u)


@register_functional("scale_score_sq")
def _scale_score_sq(table: DensityTable) -> Functional:
    return lambda u: (1.0 + np.asarray(u) * table.dlogf_dx(u)) ** 2


@register_functional("cross_score")
def _cross_score(table: DensityTable) -> Functional:
    _require_non_gaussian(table.alpha)
    return lambda u: table.dlogf_dx(u) * table.dlogf_dalpha(u) * np.asarray(u)


@register_functional("alpha_score")
def _alpha_score(table: DensityTable) -> Functional:
    _require_non_gaussian(table.alpha)
    return table.dlogf_dalpha


@register_functional("alpha_score_sq")
def _alpha_score_sq(table: DensityTable) -> Functional:
    _require_non_gaussian(table.alpha)
    return lambda u: table.dlogf_dalpha(u) ** 2


@register_functional("abs_power")
def _abs_power(table: DensityTable, p: float) -> Functional:
    if p >= table.alpha and table.alpha < 2.0:
        raise DomainError(f"E|eta|^{p} is infinite for alpha={table.alpha}")
    return lambda u: np.abs(u) ** p


@register_functional("log_a")
def _log_a(table: DensityTable, phi_plus: float, phi_minus: float, psi: float) -> Functional:
    _check_multiplier(phi_plus, phi_minus, psi, needs_positive=False)
    return lambda u: np.log(volatility_multiplier(u, phi_plus, phi_minus, psi))


@register_functional("log_a_sq")
def _log_a_sq(table: DensityTable, phi_plus: float, phi_minus: float, psi: float) -> Functional:
    log_a = _log_a(table, phi_plus, phi_minus, psi)
    return lambda u: log_a(u) ** 2


@register_functional("log_a_scale_score")
def _log_a_scale_score(table: DensityTable, phi_plus: float, phi_minus: float, psi: float) -> Functional:
    log_a = _log_a(table, phi_plus, phi_minus, psi)
    scale = _scale_score(table)
    return lambda u: log_a(u) * scale(u)


@register_functional("log_a_alpha_score")
def _log_a_alpha_score(table: DensityTable, phi_plus: float, phi_minus: float, psi: float) -> Functional:
    _require_non_gaussian(table.alpha)
    log_a = _log_a(table, phi_plus, phi_minus, psi)
    return lambda u: log_a(u) * table.dlogf_dalpha(u)


@register_functional("a_moment")
def _a_moment(table: DensityTable, phi_plus: float, phi_minus: float, psi: float,
              plus_power: int = 0, minus_power: int = 0, psi_power: int = 0,
              a_power: int = 1) -> Functional:
    """E[(u+)^(2p) (u-)^(2m) psi^q / a(u)^k]"""
    _check_multiplier(phi_plus, phi_minus, psi, needs_positive=a_power > 0)
    for own, other, phi in ((plus_power, minus_power, phi_plus), (minus_power, plus_power, phi_minus)):
        if other > 0:
            continue
        growth = 2 * own - (2 * a_power if phi > 0.0 else 0)
        if growth >= table.alpha and table.alpha < 2.0:
            raise DomainError(
                f"a_moment(p={plus_power}, m={minus_power}, k={a_power}) is infinite for alpha={table.alpha}"
            )

    def g(u):
        u = np.asarray(u, dtype=float)
        pos = np.maximum(u, 0.0)
        neg = np.minimum(u, 0.0)
        a = volatility_multiplier(u, phi_plus, phi_minus, psi)
        return pos ** (2 * plus_power) * neg ** (2 * minus_power) * psi ** psi_power / a ** a_power

    return g


@register_functional("nu")
def _nu(table: DensityTable, phi_plus: float, phi_minus: float, psi: float, power: int = 1) -> Functional:
    """(psi / a(u))^i"""
    return _a_moment(table, phi_plus, phi_minus, psi, psi_power=power, a_power=power)


def functional(alpha: Union[float, StableExponent], name: str,
               config: QuadratureConfig = DEFAULT_QUADRATURE, **params) -> Functional:
    """Vectorized g(u) for a registered functional; averaging it over residuals gives the res-kind estimate"""
    if name not in _FUNCTIONALS:
        raise ParameterError(f"unknown functional {name!r}; registered: {', '.join(registered_functionals())}")
    return _FUNCTIONALS[name](get_table(_as_alpha(alpha), config), **params)


# ============================================
# MAIN DISTRIBUTION OBJECT
# ============================================

class StableDist:
    """
    Standardized symmetric stable law S(alpha, 0, 1, 0)
    Think of this as the innovation engine every other module queries:
    scalar methods follow the reference quadrature path, table() is the fast path
    """

    def __init__(self, alpha: Union[float, StableExponent], config: Optional[QuadratureConfig] = None):
        self.exponent = alpha if isinstance(alpha, StableExponent) else StableExponent(alpha)
        self.alpha = self.exponent.value
        self.config = config or DEFAULT_QUADRATURE

    def __repr__(self) -> str:
        return f"StableDist(alpha={self.alpha:.6g})"

    # ---- reference path, one point at a time ----

    def _in_tail(self, ax: float) -> bool:
        return ax >= self.config.crossover(self.alpha)

    def _pdf_scalar(self, x: float) -> float:
        if self.alpha == 1.0:
            return float(np.exp(_cauchy_log_pdf(x)))
        if self.alpha == 2.0:
            return float(np.exp(_gauss_log_pdf(x)))
        ax = abs(x)
        if ax == 0.0:
            return float(special.gamma(1.0 + 1.0 / self.alpha) / np.pi)
        if self._in_tail(ax):
            return float(np.exp(_tail_series(self.alpha, np.array([ax]))["log_pdf"][0]))
        return _fourier_integral(self.alpha, "pdf", ax, self.config).value / np.pi

    def _log_pdf_scalar(self, x: float) -> float:
        if self.alpha == 1.0:
            return float(_cauchy_log_pdf(x))
        if self.alpha == 2.0:
            return float(_gauss_log_pdf(x))
        if x != 0.0 and self._in_tail(abs(x)):
            return float(_tail_series(self.alpha, np.array([abs(x)]))["log_pdf"][0])
        density = self._pdf_scalar(x)
        if not density > 0.0:
            raise QuadratureError("density underflow", tolerance=self.config.abs_tol, estimate=density)
        return float(np.log(density))

    def _cdf_scalar(self, x: float) -> float:
        if self.alpha == 1.0:
            return float(_cauchy_cdf(x))
        if self.alpha == 2.0:
            return float(_gauss_cdf(x))
        ax = abs(x)
        if ax == 0.0:
            return 0.5
        if self._in_tail(ax):
            sf = float(_tail_series(self.alpha, np.array([ax]))["sf"][0])
            return 1.0 - sf if x > 0 else sf
        half = _fourier_integral(self.alpha, "cdf", ax, self.config).value / np.pi
        return 0.5 + half if x > 0 else 0.5 - half

    def _dlogf_dx_scalar(self, x: float) -> float:
        if self.alpha == 1.0:
            return float(_cauchy_dlogf_dx(x))
        if self.alpha == 2.0:
            return -0.5 * x
        ax = abs(x)
        if ax == 0.0:
            return 0.0
        if self._in_tail(ax):
            value = float(_tail_series(self.alpha, np.array([ax]))["dlogf_dx"][0])
        else:
            value = _fourier_integral(self.alpha, "dx", ax, self.config).value / np.pi / self._pdf_scalar(ax)
        return value if x > 0 else -value

    def _dlogf_dalpha_scalar(self, x: float) -> float:
        _require_non_gaussian(self.alpha)
        if self.alpha == 1.0:
            return float(_cauchy_dlogf_dalpha(x))
        ax = abs(x)
        if ax == 0.0:
            return float(-special.digamma(1.0 + 1.0 / self.alpha) / self.alpha ** 2)
        if self._in_tail(ax):
            return float(_tail_series(self.alpha, np.array([ax]))["dlogf_dalpha"][0])
        return _fourier_integral(self.alpha, "dalpha", ax, self.config).value / np.pi / self._pdf_scalar(ax)

    @staticmethod
    def _elementwise(method, x):
        x = np.asarray(x, dtype=float)
        if not np.all(np.isfinite(x)):
            raise DomainError("stable-law evaluation needs finite arguments")
        if x.ndim == 0:
            return method(float(x))
        return np.vectorize(method, otypes=[float])(x)

    def pdf(self, x):
        return self._elementwise(self._pdf_scalar, x)

    def log_pdf(self, x):
        return self._elementwise(self._log_pdf_scalar, x)

    def cdf(self, x):
        return self._elementwise(self._cdf_scalar, x)

    def dlogf_dx(self, x):
        return self._elementwise(self._dlogf_dx_scalar, x)

    def dlogf_dalpha(self, x):
        return self._elementwise(self._dlogf_dalpha_scalar, x)

    def quantile(self, r: float) -> float:
        """Brent root of cdf(x) - r on a doubling bracket from the tail expansion"""
        r = float(r)
        if not 0.0 < r < 1.0:
            raise DomainError(f"quantile level must lie in (0, 1), got {r}")
        if r == 0.5:
            return 0.0
        if r < 0.5:
            return -self.quantile(1.0 - r)
        if self.alpha == 1.0:
            return float(np.tan(np.pi * (r - 0.5)))
        if self.alpha == 2.0:
            return float(np.sqrt(2.0) * special.ndtri(r))

        alpha = self.alpha
        if r < 0.75:
            x = (r - 0.5) / self._pdf_scalar(0.0)
        else:
            tail_coef = special.gamma(alpha) * np.sin(np.pi * alpha / 2.0) / np.pi
            x = (tail_coef / (1.0 - r)) ** (1.0 / alpha)

        lo, hi = 0.0, max(x, 1.0)
        for _ in range(200):
            if self._cdf_scalar(hi) >= r:
                break
            lo, hi = hi, 2.0 * hi
        x, info = optimize.brentq(
            lambda v: self._cdf_scalar(v) - r, lo, hi, xtol=QUANTILE_TOL, maxiter=200, full_output=True, disp=False
        )
        if not info.converged:
            logger.warning(f"quantile(alpha={alpha}, r={r}) stopped after {info.iterations} iterations")
        return float(x)

    def sample(self, n: int, seed: SeedLike = None) -> np.ndarray:
        return sample(self.alpha, n, seed)

    def table(self) -> DensityTable:
        return get_table(self.alpha, self.config)

    def expect(self, name: str, **params) -> QuadratureResult:
        """
        E[g(eta)] = integral over (0, inf) of (g(u) + g(-u)) f(u) du, split at the crossover
        so kinks at 0 and the tail expansion are both handled
        """
        g = functional(self.alpha, name, self.config, **params)
        table = self.table()

        def integrand(u: float) -> float:
            values = g(np.array([u, -u]))
            return float((values[0] + values[1]) * table.pdf(u))

        what = f"E[{name}] at alpha={self.alpha:.6g}"
        inner = _checked_quad(integrand, 0.0, table.crossover, self.config, what)
        outer = _checked_quad(integrand, table.crossover, np.inf, self.config, what)
        return inner + outer


# ============================================
# RANDOM VARIATES
# ============================================

def draw(rng: np.random.Generator, alpha: float, size) -> np.ndarray:
    """Chambers-Mallows-Stuck draws for the symmetric case from an existing generator"""
    alpha = _as_alpha(alpha)
    u = rng.uniform(-np.pi / 2.0, np.pi / 2.0, size)
    w = rng.standard_exponential(size)
    if alpha == 1.0:
        return np.tan(u)
    return (
        np.sin(alpha * u) / np.cos(u) ** (1.0 / alpha)
        * (np.cos((1.0 - alpha) * u) / w) ** ((1.0 - alpha) / alpha)
    )


# ============================================
# QUICK HELPER FUNCTIONS
# ============================================

def pdf(alpha, x, config: Optional[QuadratureConfig] = None):
    return StableDist(alpha, config).pdf(x)


def log_pdf(alpha, x, config: Optional[QuadratureConfig] = None):
    return StableDist(alpha, config).log_pdf(x)


def cdf(alpha, x, config: Optional[QuadratureConfig] = None):
    return StableDist(alpha, config).cdf(x)


def quantile(alpha, r: float, config: Optional[QuadratureConfig] = None) -> float:
    return StableDist(alpha, config).quantile(r)


def dlogf_dx(alpha, x, config: Optional[QuadratureConfig] = None):
    return StableDist(alpha, config).dlogf_dx(x)


def dlogf_dalpha(alpha, x, config: Optional[QuadratureConfig] = None):
    return StableDist(alpha, config).dlogf_dalpha(x)


def sample(alpha, n: int, seed: SeedLike = None) -> np.ndarray:
    """n i.i.d. draws, deterministic given seed"""
    if int(n) != n or n < 1:
        raise ParameterError(f"sample size must be a positive integer, got {n!r}")
    return draw(np.random.default_rng(seed), alpha, int(n))


def expect(alpha, name: str, config: Optional[QuadratureConfig] = None, **params) -> QuadratureResult:
    return StableDist(alpha, config).expect(name, **params)
