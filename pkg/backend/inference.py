"""
Fisher Information and Asymptotic Standard Deviations
Sigma (stationary), Upsilon (explosive), the universal Schur-complement estimator
and the nu building blocks, each with integral (int) or residual (res) innovation factors
"""

import logging
from dataclasses import dataclass
from typing import TYPE_CHECKING, Dict, Optional, Sequence, Tuple, Union

import numpy as np

from backend.exceptions import DegenerateError, DomainError, ParameterError, RankDeficiencyError
from backend.sagarch_model import PARAM_NAMES, ParamVector, ReturnSeries, as_series, simulate
from backend.sagarch_model import filter as volatility_filter
from backend.stable_dist import DEFAULT_QUADRATURE, QuadratureConfig, StableDist, functional

if TYPE_CHECKING:
    from backend.mle import FitResult

logger = logging.getLogger(__name__)

KINDS = ("int", "res")
MATRIX_KINDS = ("sigma_int", "sigma_res", "upsilon_int", "upsilon_res", "universal")
VARTHETA_NAMES = PARAM_NAMES[1:]
PINV_CONDITION = 1e12
RANK_TOLERANCE = 1e-12
MIN_OBSERVATIONS = 20


# ============================================
# RESULT TYPES
# ============================================

@dataclass(frozen=True, eq=False)
class InfoMatrix:
    """Symmetric information matrix (5x5 over theta or 4x4 over vartheta)"""

    entries: np.ndarray
    kind: str
    names: Tuple[str, ...]
    selected: Optional[str] = None

    def __post_init__(self):
        entries = np.asarray(self.entries, dtype=float)
        if entries.ndim != 2 or entries.shape[0] != entries.shape[1] or entries.shape[0] != len(self.names):
            raise ParameterError(f"information matrix shape {entries.shape} does not match names {self.names}")
        if self.kind not in MATRIX_KINDS:
            raise ParameterError(f"unknown matrix kind {self.kind!r}")
        object.__setattr__(self, "entries", 0.5 * (entries + entries.T))

    @property
    def size(self) -> int:
        return len(self.names)

    def index(self, name: str) -> int:
        return self.names.index(name)

    def min_eigenvalue_ratio(self) -> float:
        eig = np.linalg.eigvalsh(self.entries)
        return float(eig[0] / max(abs(np.trace(self.entries)), np.finfo(float).tiny))


@dataclass(frozen=True)
class AsdReport:
    """sqrt(diag(M^-1) / n) per parameter"""

    asd: Dict[str, float]
    source: str
    n: int
    pseudo_inverse: bool = False
    condition: float = 1.0
    selected: Optional[str] = None

    def as_array(self, names: Sequence[str] = PARAM_NAMES) -> np.ndarray:
        return np.array([self.asd.get(name, np.nan) for name in names])


@dataclass(frozen=True)
class EtaFactors:
    """Innovation expectations c1 = E(1 + eta f'/f)^2, c2 = E(f'/f d_alpha log f eta), c3 = E(d_alpha log f)^2"""

    c1: float
    c2: float
    c3: float
    kind: str


# ============================================
# SHARED HELPERS
# ============================================

def recommended_kind(alpha_hat: float) -> str:
    """Integral factors for alpha_hat <= 1, residual factors for alpha_hat in (1, 2)"""
    return "int" if alpha_hat <= 1.0 else "res"


def _resolve_kind(kind: str, alpha: float) -> Tuple[str, Optional[str]]:
    if kind == "auto":
        chosen = recommended_kind(alpha)
        logger.info(f"Auto-selected {chosen} innovation factors for alpha_hat={alpha:.4f}")
        return chosen, chosen
    if kind not in KINDS:
        raise ParameterError(f"kind must be one of {KINDS} or 'auto', got {kind!r}")
    return kind, None


def eta_moment(kind: str, alpha: float, name: str, eta: Optional[np.ndarray] = None,
               quadrature: QuadratureConfig = DEFAULT_QUADRATURE, **params) -> float:
    """E[g(eta)] by quadrature (int) or as a residual average (res)"""
    if kind == "int":
        return StableDist(alpha, quadrature).expect(name, **params).value
    if eta is None:
        raise ParameterError("residual-based moments need residuals")
    return float(np.mean(functional(alpha, name, quadrature, **params)(eta)))


def eta_factors(kind: str, alpha: float, eta: Optional[np.ndarray] = None,
                quadrature: QuadratureConfig = DEFAULT_QUADRATURE) -> EtaFactors:
    return EtaFactors(
        c1=eta_moment(kind, alpha, "scale_score_sq", eta, quadrature),
        c2=eta_moment(kind, alpha, "cross_score", eta, quadrature),
        c3=eta_moment(kind, alpha, "alpha_score_sq", eta, quadrature),
        kind=kind,
    )


def _check_fit(fit: "FitResult", y: ReturnSeries) -> None:
    if y.n < MIN_OBSERVATIONS:
        raise ParameterError(f"information estimates need n >= {MIN_OBSERVATIONS}, got {y.n}")
    if not fit.converged:
        logger.warning("Information matrix requested for a fit that did not report convergence")


def _assemble_sigma(sigma_outer: np.ndarray, sigma_mean: np.ndarray, factors: EtaFactors) -> np.ndarray:
    matrix = np.empty((5, 5))
    matrix[:4, :4] = 0.25 * factors.c1 * sigma_outer
    matrix[4, :4] = matrix[:4, 4] = -0.5 * factors.c2 * sigma_mean
    matrix[4, 4] = factors.c3
    return matrix


def _require_full_rank(matrix: np.ndarray, names: Tuple[str, ...], blocks: Dict[str, Sequence[int]]) -> None:
    """Raise RankDeficiencyError naming the first singular block"""
    scale = max(np.abs(np.diag(matrix)).max(), np.finfo(float).tiny)
    eig = np.linalg.eigvalsh(matrix)
    if eig[0] > RANK_TOLERANCE * scale:
        return
    for block, idx in blocks.items():
        sub = matrix[np.ix_(idx, idx)]
        if np.linalg.eigvalsh(sub)[0] <= RANK_TOLERANCE * scale:
            raise RankDeficiencyError("singular information matrix", block=block)
    raise RankDeficiencyError("singular information matrix", block="full")


# ============================================
# SIGMA (STATIONARY)
# ============================================

def sigma_hat(kind: str, fit: "FitResult", y: Union[ReturnSeries, np.ndarray],
              quadrature: QuadratureConfig = DEFAULT_QUADRATURE) -> InfoMatrix:
    """
    5x5 Sigma estimate: sigma-factors from sample averages of the filter derivatives,
    eta-factors from quadrature (int) or residual averages (res); kind='auto' applies the
    recommendation rule and records the choice
    """
    y = as_series(y)
    _check_fit(fit, y)
    theta = fit.theta_hat
    kind, selected = _resolve_kind(kind, theta.alpha)

    out = volatility_filter(theta, y)
    rel = out.rel_dsigma2
    factors = eta_factors(kind, theta.alpha, out.residuals, quadrature)
    matrix = _assemble_sigma(rel.T @ rel / y.n, rel.mean(axis=0), factors)
    _require_full_rank(matrix, PARAM_NAMES, {
        "omega-omega": [0],
        "vartheta_tilde": [1, 2, 3],
        "theta_tilde": [0, 1, 2, 3],
        "alpha-alpha": [4],
    })
    return InfoMatrix(matrix, f"sigma_{kind}", PARAM_NAMES, selected)


def population_sigma(theta: ParamVector, length: int = 20000, seed: int = 0, burn_in: int = 500,
                     quadrature: QuadratureConfig = DEFAULT_QUADRATURE) -> InfoMatrix:
    """Sigma at a known theta: sigma-factors averaged over one long path at theta, integral eta-factors"""
    path = simulate(theta, length, seed=seed, burn_in=burn_in)
    out = volatility_filter(theta, path.series)
    rel = out.rel_dsigma2
    factors = eta_factors("int", theta.alpha, quadrature=quadrature)
    matrix = _assemble_sigma(rel.T @ rel / rel.shape[0], rel.mean(axis=0), factors)
    return InfoMatrix(matrix, "sigma_int", PARAM_NAMES)


# ============================================
# UPSILON (EXPLOSIVE)
# ============================================

def nu_moments(kind: str, theta: ParamVector, eta: Optional[np.ndarray] = None,
               quadrature: QuadratureConfig = DEFAULT_QUADRATURE) -> Tuple[float, float]:
    """(nu_1, nu_2) with nu_i = E{psi / a(eta)}^i"""
    if not theta.psi > 0.0:
        raise DomainError("nu_i is undefined when psi = 0")
    if theta.phi_plus == 0.0 and theta.phi_minus == 0.0:
        return 1.0, 1.0
    coef = dict(phi_plus=theta.phi_plus, phi_minus=theta.phi_minus, psi=theta.psi)
    return (
        eta_moment(kind, theta.alpha, "nu", eta, quadrature, power=1, **coef),
        eta_moment(kind, theta.alpha, "nu", eta, quadrature, power=2, **coef),
    )


def nu_hat(kind: str, fit: "FitResult", y: Union[ReturnSeries, np.ndarray],
           quadrature: QuadratureConfig = DEFAULT_QUADRATURE) -> Tuple[float, float]:
    y = as_series(y)
    eta = volatility_filter(fit.theta_hat, y).residuals if kind == "res" else None
    return nu_moments(kind, fit.theta_hat, eta, quadrature)


def d_moments(kind: str, theta: ParamVector, eta: Optional[np.ndarray] = None,
              quadrature: QuadratureConfig = DEFAULT_QUADRATURE) -> Tuple[np.ndarray, np.ndarray]:
    """
    E(d) and E(d d') for the explosive-limit derivative process over (phi+, phi-, psi):
    d_t = h_{t-1}/a_{t-1} + w_{t-1} d_{t-1}, h = ((eta+)^2, (eta-)^2, 1), w = psi/a
    """
    nu1, nu2 = nu_moments(kind, theta, eta, quadrature)
    if not (nu1 < 1.0 and nu2 < 1.0):
        raise RankDeficiencyError("E(d d') diverges because nu_i = 1", block="nu")
    psi = theta.psi
    coef = dict(phi_plus=theta.phi_plus, phi_minus=theta.phi_minus, psi=psi)

    def moment(**powers) -> float:
        return eta_moment(kind, theta.alpha, "a_moment", eta, quadrature, **coef, **powers)

    # g = psi h / a
    g_mean = np.array([moment(plus_power=1, psi_power=1), moment(minus_power=1, psi_power=1), nu1])
    g_outer = np.zeros((3, 3))
    g_outer[0, 0] = moment(plus_power=2, psi_power=2, a_power=2)
    g_outer[1, 1] = moment(minus_power=2, psi_power=2, a_power=2)
    g_outer[0, 2] = g_outer[2, 0] = moment(plus_power=1, psi_power=2, a_power=2)
    g_outer[1, 2] = g_outer[2, 1] = moment(minus_power=1, psi_power=2, a_power=2)
    g_outer[2, 2] = nu2
    # m = E[w g] coincides with the last column of E[g g'] since g_3 = w
    m = g_outer[:, 2].copy()

    d_mean = g_mean / (psi * (1.0 - nu1))
    d_outer = (g_outer / psi ** 2 + (np.outer(m, d_mean) + np.outer(d_mean, m)) / psi) / (1.0 - nu2)
    return d_mean, d_outer


def _assemble_upsilon(d_mean: np.ndarray, d_outer: np.ndarray, factors: EtaFactors) -> np.ndarray:
    matrix = np.empty((4, 4))
    matrix[:3, :3] = 0.25 * factors.c1 * d_outer
    matrix[3, :3] = matrix[:3, 3] = -0.5 * factors.c2 * d_mean
    matrix[3, 3] = factors.c3
    return matrix


def upsilon_hat(kind: str, fit: "FitResult", y: Union[ReturnSeries, np.ndarray],
                quadrature: QuadratureConfig = DEFAULT_QUADRATURE) -> InfoMatrix:
    """4x4 Upsilon over vartheta assembled from the nu-type moments and eta-factors"""
    y = as_series(y)
    _check_fit(fit, y)
    theta = fit.theta_hat
    kind, selected = _resolve_kind(kind, theta.alpha)
    eta = volatility_filter(theta, y).residuals if kind == "res" else None

    d_mean, d_outer = d_moments(kind, theta, eta, quadrature)
    factors = eta_factors(kind, theta.alpha, eta, quadrature)
    matrix = _assemble_upsilon(d_mean, d_outer, factors)
    _require_full_rank(matrix, VARTHETA_NAMES, {"vartheta_tilde": [0, 1, 2], "alpha-alpha": [3]})
    return InfoMatrix(matrix, f"upsilon_{kind}", VARTHETA_NAMES, selected)


def population_upsilon(theta: ParamVector, quadrature: QuadratureConfig = DEFAULT_QUADRATURE) -> InfoMatrix:
    """Upsilon at a known theta from integral moments only"""
    d_mean, d_outer = d_moments("int", theta, None, quadrature)
    factors = eta_factors("int", theta.alpha, quadrature=quadrature)
    return InfoMatrix(_assemble_upsilon(d_mean, d_outer, factors), "upsilon_int", VARTHETA_NAMES)


# ============================================
# UNIVERSAL ESTIMATOR
# ============================================

def schur_complement(sigma: InfoMatrix) -> InfoMatrix:
    """Upsilon_* = Sigma_vv - Sigma_vw Sigma_ww^-1 Sigma_vw' with w = omega"""
    if sigma.names != PARAM_NAMES:
        raise ParameterError("Schur complement needs a 5x5 matrix over theta")
    entries = sigma.entries
    s_ww = entries[0, 0]
    if not s_ww > 0.0:
        raise DegenerateError(f"Sigma_omega_omega must be positive, got {s_ww:.3g}")
    s_vw = entries[1:, 0]
    matrix = entries[1:, 1:] - np.outer(s_vw, s_vw) / s_ww
    return InfoMatrix(matrix, "universal", VARTHETA_NAMES, sigma.selected)


def universal_variance(fit: "FitResult", y: Union[ReturnSeries, np.ndarray], kind: str = "res",
                       quadrature: QuadratureConfig = DEFAULT_QUADRATURE) -> InfoMatrix:
    """4x4 Upsilon_* usable in both regimes; no stationarity knowledge needed"""
    return schur_complement(sigma_hat(kind, fit, y, quadrature))


# ============================================
# INVERSION AND ASD
# ============================================

def inverse(matrix: InfoMatrix) -> Tuple[np.ndarray, bool, float]:
    """Symmetric eigendecomposition inverse with pseudo-inverse fallback past condition 1e12"""
    eig, vec = np.linalg.eigh(matrix.entries)
    top = eig[-1]
    if not top > 0.0:
        raise RankDeficiencyError("information matrix has no positive eigenvalue", block="full")
    condition = float(top / eig[0]) if eig[0] > 0.0 else np.inf
    pseudo = not condition <= PINV_CONDITION
    if pseudo:
        logger.warning(f"Ill-conditioned {matrix.kind} matrix (condition {condition:.3g}); using pseudo-inverse")
        keep = eig > top / PINV_CONDITION
        inv = (vec[:, keep] / eig[keep]) @ vec[:, keep].T
    else:
        inv = (vec / eig) @ vec.T
    return inv, pseudo, condition


def asd(matrix: InfoMatrix, n: int) -> AsdReport:
    """Asymptotic standard deviations sqrt(diag(M^-1) / n)"""
    if n < 1:
        raise ParameterError("n must be positive")
    inv, pseudo, condition = inverse(matrix)
    values = np.sqrt(np.clip(np.diag(inv), 0.0, None) / n)
    return AsdReport(
        asd=dict(zip(matrix.names, values.tolist())),
        source=matrix.kind,
        n=int(n),
        pseudo_inverse=pseudo,
        condition=condition,
        selected=matrix.selected,
    )
