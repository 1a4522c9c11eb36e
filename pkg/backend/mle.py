"""
Maximum Likelihood Estimation
Conditional log-likelihood, analytic score and the multistart box-constrained fit
"""

import logging
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, replace
from typing import Any, Dict, List, Optional, Tuple, Union

import numpy as np
from scipy import optimize
from scipy.special import expit, logit

from backend import lyapunov
from backend.exceptions import (
    DomainError,
    NumericError,
    OptimizationError,
    ParameterError,
    QuadratureError,
)
from backend.sagarch_model import ParamVector, ReturnSeries, as_series
from backend.sagarch_model import filter as volatility_filter
from backend.stable_dist import DEFAULT_QUADRATURE, QuadratureConfig, get_table

logger = logging.getLogger(__name__)

MODES = ("stationary", "free")
MIN_OBSERVATIONS = 20
START_ALPHAS = (0.8, 1.2, 1.6)
START_PSIS = (0.3, 0.7)
START_PHI = 0.1
# objective value returned when the density numerics fail at a trial point
PENALTY = 1e10
LOGIT_RANGE = 40.0


# ============================================
# CONFIGURATION AND RESULT TYPES
# ============================================

@dataclass(frozen=True)
class FitConfig:
    """Parameter box, optimizer controls and mode for fit()"""

    mode: str = "stationary"
    omega_bounds: Tuple[float, float] = (1e-6, 1e6)
    phi_bounds: Tuple[float, float] = (0.0, 10.0)
    psi_bounds: Optional[Tuple[float, float]] = None
    alpha_bounds: Tuple[float, float] = (0.05, 1.95)
    tol: float = 1e-6
    maxiter: int = 500
    multistart: int = 6
    fixed_alpha: Optional[float] = None
    workers: int = 1
    quadrature: QuadratureConfig = DEFAULT_QUADRATURE

    def __post_init__(self):
        if self.mode not in MODES:
            raise ParameterError(f"mode must be one of {MODES}, got {self.mode!r}")
        if self.psi_bounds is None:
            default = (1e-8, 1.0 - 1e-6) if self.mode == "stationary" else (1e-8, 10.0)
            object.__setattr__(self, "psi_bounds", default)
        for name in ("omega_bounds", "phi_bounds", "psi_bounds", "alpha_bounds"):
            lo, hi = getattr(self, name)
            if not lo < hi:
                raise ParameterError(f"{name}: lower bound {lo} must be below upper bound {hi}")
        if self.omega_bounds[0] <= 0.0:
            raise ParameterError("omega lower bound must be positive")
        if self.phi_bounds[0] < 0.0 or self.psi_bounds[0] < 0.0:
            raise ParameterError("phi and psi bounds must be nonnegative")
        if self.mode == "stationary" and self.psi_bounds[1] >= 1.0:
            raise ParameterError("stationary mode needs psi < 1")
        if not (0.0 < self.alpha_bounds[0] and self.alpha_bounds[1] <= 2.0):
            raise ParameterError("alpha bounds must lie in (0, 2]")
        if self.fixed_alpha is not None and not 0.0 < self.fixed_alpha < 2.0:
            raise ParameterError(f"fixed_alpha must lie in (0, 2), got {self.fixed_alpha}")
        if not self.tol > 0 or self.maxiter < 1 or self.multistart < 1 or self.workers < 1:
            raise ParameterError("tol, maxiter, multistart and workers must be positive")

    def bounds(self) -> np.ndarray:
        return np.array([self.omega_bounds, self.phi_bounds, self.phi_bounds, self.psi_bounds, self.alpha_bounds])

    @property
    def free_alpha(self) -> bool:
        return self.fixed_alpha is None


@dataclass
class FitResult:
    """MLE theta_hat with diagnostics; regime_estimate comes from the lyapunov module"""

    theta_hat: ParamVector
    loglik: float
    converged: bool
    iterations: int
    gradient_norm: float
    regime_estimate: Optional["lyapunov.LyapunovEstimate"]
    n: int
    mode: str
    aic: float
    method: str
    omega_inferential: bool = True
    fixed_alpha: Optional[float] = None
    starts: List[Dict[str, Any]] = field(default_factory=list)

    @property
    def free_parameters(self) -> int:
        return 5 if self.fixed_alpha is None else 4


# ============================================
# LIKELIHOOD AND SCORE
# ============================================

def _locate(table_fn, eta: np.ndarray, error: QuadratureError) -> QuadratureError:
    """Re-evaluate pointwise to tag the first failing observation (t is 1-based)"""
    for i, value in enumerate(eta):
        try:
            table_fn(np.array([value]))
        except QuadratureError:
            return error.at(i + 1)
    return error


def loglik_terms(theta: ParamVector, y: Union[ReturnSeries, np.ndarray],
                 quadrature: QuadratureConfig = DEFAULT_QUADRATURE,
                 with_score: bool = False):
    """
    Per-observation log-likelihood l_t = -log sigma~_t + log f_alpha(eta_t) and,
    when requested, the per-observation score (n x 5)
    """
    out = volatility_filter(theta, y)
    eta = out.residuals
    table = get_table(theta.alpha, quadrature)
    try:
        log_f = table.log_pdf(eta)
    except QuadratureError as err:
        raise _locate(table.log_pdf, eta, err) from err
    terms = -0.5 * out.log_sigma2 + log_f
    if not with_score:
        return terms, None

    scale_score = 1.0 + eta * table.dlogf_dx(eta)
    scores = np.empty((eta.size, 5))
    scores[:, :4] = -0.5 * out.rel_dsigma2 * scale_score[:, None]
    try:
        scores[:, 4] = table.dlogf_dalpha(eta)
    except QuadratureError as err:
        raise _locate(table.dlogf_dalpha, eta, err) from err
    return terms, scores


def loglik(theta: ParamVector, y: Union[ReturnSeries, np.ndarray],
           quadrature: QuadratureConfig = DEFAULT_QUADRATURE) -> float:
    """Sum of l_t(theta), t = 1..n"""
    terms, _ = loglik_terms(theta, y, quadrature)
    return float(np.sum(terms))


def average_loglik(theta: ParamVector, y: Union[ReturnSeries, np.ndarray],
                   quadrature: QuadratureConfig = DEFAULT_QUADRATURE) -> float:
    terms, _ = loglik_terms(theta, y, quadrature)
    return float(np.mean(terms))


def score(theta: ParamVector, y: Union[ReturnSeries, np.ndarray],
          quadrature: QuadratureConfig = DEFAULT_QUADRATURE) -> np.ndarray:
    """
    Analytic gradient of loglik:
    dl/d theta_tilde = -(1/2) (d sigma~^2/d theta_tilde)/sigma~^2 (1 + eta dlogf_dx(eta)),
    dl/d alpha = dlogf_dalpha(eta)
    """
    _, scores = loglik_terms(theta, y, quadrature, with_score=True)
    return scores.sum(axis=0)


# ============================================
# OPTIMIZER COORDINATES
# ============================================

class _Coordinates:
    """
    Maps the free parameters to optimizer coordinates: log omega, raw phi,
    logit-scaled psi in stationary mode (raw psi in free mode), raw alpha
    """

    def __init__(self, config: FitConfig):
        self.config = config
        self.box = config.bounds()
        self.logit_psi = config.mode == "stationary"
        self.free = [0, 1, 2, 3, 4] if config.free_alpha else [0, 1, 2, 3]

    def to_theta(self, z: np.ndarray) -> ParamVector:
        full = np.empty(5)
        full[0] = np.exp(z[0])
        full[1:3] = z[1:3]
        if self.logit_psi:
            lo, hi = self.box[3]
            full[3] = lo + (hi - lo) * expit(z[3])
        else:
            full[3] = z[3]
        full[:4] = np.clip(full[:4], self.box[:4, 0], self.box[:4, 1])
        if self.config.free_alpha:
            full[4] = np.clip(z[4], *self.box[4])
        else:
            full[4] = self.config.fixed_alpha
        return ParamVector.from_array(full)

    def to_z(self, theta: ParamVector) -> np.ndarray:
        full = theta.as_array()
        z = np.empty(len(self.free))
        z[0] = np.log(full[0])
        z[1:3] = full[1:3]
        if self.logit_psi:
            lo, hi = self.box[3]
            share = np.clip((full[3] - lo) / (hi - lo), 1e-12, 1 - 1e-12)
            z[3] = np.clip(logit(share), -LOGIT_RANGE, LOGIT_RANGE)
        else:
            z[3] = full[3]
        if self.config.free_alpha:
            z[4] = full[4]
        return z

    def jacobian(self, z: np.ndarray) -> np.ndarray:
        """d theta_free / d z (diagonal)"""
        jac = np.ones(len(self.free))
        jac[0] = np.exp(z[0])
        if self.logit_psi:
            lo, hi = self.box[3]
            share = expit(z[3])
            jac[3] = (hi - lo) * share * (1.0 - share)
        return jac

    def bounds(self) -> List[Tuple[float, float]]:
        out = [(float(np.log(self.box[0, 0])), float(np.log(self.box[0, 1]))),
               tuple(self.box[1]), tuple(self.box[2])]
        out.append((-LOGIT_RANGE, LOGIT_RANGE) if self.logit_psi else tuple(self.box[3]))
        if self.config.free_alpha:
            out.append(tuple(self.box[4]))
        return [(float(lo), float(hi)) for lo, hi in out]


def _projected_gradient_norm(theta: ParamVector, grad: np.ndarray, config: FitConfig, free: List[int]) -> float:
    """Norm of the average score with components pushing out of the box removed"""
    box = config.bounds()
    values = theta.as_array()
    g = grad[free].copy()
    for j, idx in enumerate(free):
        at_lower = values[idx] <= box[idx, 0] * (1 + 1e-9) + 1e-12 and g[j] < 0.0
        at_upper = values[idx] >= box[idx, 1] * (1 - 1e-9) - 1e-12 and g[j] > 0.0
        if at_lower or at_upper:
            g[j] = 0.0
    return float(np.linalg.norm(g))


# ============================================
# FIT
# ============================================

def starting_points(y: ReturnSeries, config: FitConfig) -> List[ParamVector]:
    """Deterministic grid: alpha in {0.8, 1.2, 1.6} x psi in {0.3, 0.7}, phi = 0.1, omega = median(y^2)(1 - psi)"""
    box = config.bounds()
    scale = float(np.median(y.values[1:] ** 2))
    alphas = START_ALPHAS if config.free_alpha else (config.fixed_alpha,)
    points = []
    for alpha in alphas:
        for psi in START_PSIS:
            psi = float(np.clip(psi, *box[3]))
            omega = float(np.clip(scale * (1.0 - min(psi, 0.99)), *box[0]))
            phi = float(np.clip(START_PHI, *box[1]))
            points.append(ParamVector(omega, phi, phi, psi, alpha))
    return points[: config.multistart]


def _run_start(index: int, start: ParamVector, y: ReturnSeries, config: FitConfig) -> Dict[str, Any]:
    coords = _Coordinates(config)
    n = y.n

    def objective(z: np.ndarray):
        try:
            theta = coords.to_theta(z)
            terms, scores = loglik_terms(theta, y, config.quadrature, with_score=True)
        except (NumericError, DomainError) as err:
            logger.debug(f"start {index}: objective failed at z={z}: {err}")
            return PENALTY, np.zeros_like(z)
        value = -float(np.sum(terms)) / n
        if not np.isfinite(value):
            return PENALTY, np.zeros_like(z)
        grad = -scores.sum(axis=0)[coords.free] / n * coords.jacobian(z)
        return value, grad

    z0 = coords.to_z(start)
    record: Dict[str, Any] = {"start": index, "initial": start.as_dict()}
    try:
        res = optimize.minimize(
            objective, z0, jac=True, method="L-BFGS-B", bounds=coords.bounds(),
            options={"maxiter": config.maxiter, "gtol": config.tol, "ftol": 1e-12},
        )
        method = "L-BFGS-B"
        iterations = int(res.nit)
        if not res.success or not np.isfinite(res.fun) or res.fun >= PENALTY:
            logger.warning(f"start {index}: L-BFGS-B stopped ({res.message}); trying Nelder-Mead")
            z_from = res.x if np.isfinite(res.fun) and res.fun < PENALTY else z0
            simplex = optimize.minimize(
                lambda z: objective(z)[0], z_from, method="Nelder-Mead", bounds=coords.bounds(),
                options={"maxiter": config.maxiter * 4, "xatol": 1e-8, "fatol": 1e-12},
            )
            if simplex.fun <= res.fun:
                res, method = simplex, "Nelder-Mead"
                iterations += int(simplex.nit)
    except (ValueError, ArithmeticError) as err:
        record.update({"ok": False, "message": str(err)})
        logger.warning(f"start {index}: optimizer raised {err}")
        return record

    ok = bool(np.isfinite(res.fun) and res.fun < PENALTY)
    record.update({
        "ok": ok,
        "success": bool(res.success),
        "objective": float(res.fun),
        "iterations": iterations,
        "method": method,
        "message": str(res.message),
        "z": np.asarray(res.x, dtype=float),
    })
    logger.info(
        f"start {index}: {method} objective={res.fun:.8g} iterations={iterations} success={res.success}"
    )
    return record


def fit(y: Union[ReturnSeries, np.ndarray], config: Optional[FitConfig] = None) -> FitResult:
    """theta_hat = argmax of the log-likelihood over the parameter box, best of the multistart grid"""
    config = config or FitConfig()
    y = as_series(y)
    if y.n < MIN_OBSERVATIONS:
        raise ParameterError(f"fit needs n >= {MIN_OBSERVATIONS} observations, got {y.n}")

    starts = starting_points(y, config)
    logger.info(f"Fitting sAGARCH(1,1): n={y.n}, mode={config.mode}, {len(starts)} start(s)")
    if config.workers > 1 and len(starts) > 1:
        with ThreadPoolExecutor(max_workers=config.workers) as pool:
            records = list(pool.map(lambda item: _run_start(item[0], item[1], y, config), enumerate(starts)))
    else:
        records = [_run_start(i, start, y, config) for i, start in enumerate(starts)]

    good = [r for r in records if r.get("ok")]
    if not good:
        raise OptimizationError("all optimizer starts failed", diagnostics=_public(records))
    best = min(good, key=lambda r: (r["objective"], r["start"]))

    coords = _Coordinates(config)
    theta_hat = coords.to_theta(best["z"])
    terms, scores = loglik_terms(theta_hat, y, config.quadrature, with_score=True)
    total = float(np.sum(terms))
    if not np.isfinite(total):
        raise OptimizationError("log-likelihood at the optimum is not finite", diagnostics=_public(records))
    gradient_norm = _projected_gradient_norm(theta_hat, scores.sum(axis=0) / y.n, config, coords.free)

    k = len(coords.free)
    result = FitResult(
        theta_hat=theta_hat,
        loglik=total,
        converged=bool(best["success"]),
        iterations=int(best["iterations"]),
        gradient_norm=gradient_norm,
        regime_estimate=None,
        n=y.n,
        mode=config.mode,
        aic=-2.0 * total + 2.0 * k,
        method=best["method"],
        fixed_alpha=config.fixed_alpha,
        starts=_public(records),
    )
    try:
        result.regime_estimate = lyapunov.estimate_from_theta(theta_hat, y, kind="res", quadrature=config.quadrature)
        if config.mode == "free":
            result.omega_inferential = not result.regime_estimate.gamma_hat > 0.0
    except (NumericError, DomainError) as err:
        logger.warning(f"Lyapunov estimate unavailable for the fitted model: {err}")

    logger.info(
        f"Fit done: loglik={total:.6f} converged={result.converged} |grad|={gradient_norm:.2e} "
        + " ".join(f"{name}={value:.5f}" for name, value in theta_hat.as_dict().items())
    )
    return result


def _public(records: List[Dict[str, Any]]) -> List[Dict[str, Any]]:
    return [{k: v for k, v in r.items() if k != "z"} for r in records]


def with_mode(config: FitConfig, mode: str) -> FitConfig:
    """Copy of config in another mode with that mode's default psi bounds"""
    return replace(config, mode=mode, psi_bounds=None)
