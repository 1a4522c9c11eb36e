"""
Monte Carlo Harness
Replicated simulate-fit-estimate loops for the MLE tables and the test size/power
curves, with counter-based seeding so results do not depend on the worker count
"""

import logging
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field, replace
from functools import partial
from typing import Any, Callable, Dict, List, Literal, Optional, Sequence

import numpy as np
import pandas as pd
from pydantic import BaseModel, ConfigDict, Field, model_validator

from backend import hypothesis_tests, inference, mle
from backend.exceptions import ExperimentError, ParameterError, SagarchError
from backend.sagarch_model import (PARAM_NAMES, InnovationSampler, ParamVector, ReturnSeries, SimulatedPath,
                                   simulate)
from data.designs import get_design

logger = logging.getLogger(__name__)

MAX_FAILURE_SHARE = 0.05
TEST_IDS = ("stationarity", "explosivity", "symmetry", "diagnostic")
AXES = ("alpha", "df", "phi_minus")
VARTHETA = PARAM_NAMES[1:]


# ============================================
# EXPERIMENT SPECIFICATION
# ============================================

class ExperimentSpec(BaseModel):
    """One simulation study: a design, sample sizes, replications and seeding"""

    model_config = ConfigDict(frozen=True, extra="forbid")

    design_id: str
    theta: Optional[List[float]] = None
    sample_sizes: List[int] = Field(default_factory=lambda: [200, 500, 1000])
    replications: int = Field(default=200, ge=1)
    innovation: Literal["stable", "student_t"] = "stable"
    df: Optional[float] = Field(default=None, gt=0)
    master_seed: int = Field(default=20240601, ge=0)
    workers: int = Field(default=1, ge=1)
    burn_in: int = Field(default=500, ge=0)
    fit_mode: Literal["stationary", "free"] = "stationary"
    multistart: int = Field(default=6, ge=1)
    reference_length: int = Field(default=20000, ge=1000)
    level: float = Field(default=0.05, gt=0, lt=1)
    alpha_star: Optional[float] = Field(default=None, gt=0, lt=2)

    @model_validator(mode="before")
    @classmethod
    def _explosive_defaults(cls, data: Any) -> Any:
        """Explosive designs start at sigma_0^2 = omega with no burn-in and fit in free mode"""
        if not isinstance(data, dict):
            return data
        if data.get("theta") is not None:
            explosive = data.get("fit_mode") == "free"
        else:
            try:
                explosive = get_design(str(data.get("design_id", ""))).regime == "explosive"
            except ParameterError:
                return data
        if explosive:
            data = {"burn_in": 0, "fit_mode": "free", **data}
        return data

    @model_validator(mode="after")
    def _consistent(self) -> "ExperimentSpec":
        if not self.sample_sizes or min(self.sample_sizes) < mle.MIN_OBSERVATIONS:
            raise ValueError(f"sample sizes must be >= {mle.MIN_OBSERVATIONS}")
        if self.innovation == "student_t" and self.df is None:
            raise ValueError("student_t innovations need df")
        if self.theta is not None and len(self.theta) != 5:
            raise ValueError("theta needs 5 entries")
        return self

    def true_theta(self) -> ParamVector:
        if self.theta is not None:
            return ParamVector.from_array(self.theta)
        return get_design(self.design_id).theta

    def regime(self) -> str:
        if self.theta is not None:
            return "stationary" if self.fit_mode == "stationary" else "explosive"
        return get_design(self.design_id).regime


# ============================================
# RESULT TYPES
# ============================================

@dataclass
class CellResult:
    """Aggregates over the successful replications at one sample size"""

    n: int
    replications: int
    failures: int
    bias: List[float]
    esd: List[float]
    asd: List[float]
    asd_int: List[float]
    asd_res: List[float]
    asd_universal: List[float] = field(default_factory=list)
    truncated: int = 0


@dataclass
class RejectionPoint:
    n: int
    value: float
    frequency: float
    replications: int
    failures: int


@dataclass
class ExperimentResult:
    spec: ExperimentSpec
    kind: str
    cells: List[CellResult] = field(default_factory=list)
    curve: List[RejectionPoint] = field(default_factory=list)
    test_id: Optional[str] = None
    axis: Optional[str] = None
    records: List[Dict[str, Any]] = field(default_factory=list)
    elapsed_seconds: float = 0.0

    def to_dict(self, include_timing: bool = False) -> Dict[str, Any]:
        """JSON-ready view; timing is left out by default so reruns compare byte for byte"""
        out = {
            "kind": self.kind,
            "spec": self.spec.model_dump(),
            "parameters": list(PARAM_NAMES),
        }
        if self.kind == "mle":
            out["cells"] = [asdict(cell) for cell in self.cells]
        else:
            out["test"] = self.test_id
            out["axis"] = self.axis
            out["curve"] = [asdict(point) for point in self.curve]
        if include_timing:
            out["elapsed_seconds"] = self.elapsed_seconds
        return out

    def cell(self, n: int) -> CellResult:
        for cell in self.cells:
            if cell.n == n:
                return cell
        raise ParameterError(f"no cell for n={n}")

    def estimates_frame(self) -> pd.DataFrame:
        """One row per successful replication (n, replication, estimates, ASDs)"""
        rows = []
        for record in self.records:
            if not record.get("ok"):
                continue
            row = {"n": record["n"], "replication": record["r"]}
            if "value" in record:
                row.update(value=record["value"], statistic=record["statistic"], reject=record["reject"])
            else:
                row.update(dict(zip(PARAM_NAMES, record["estimate"])))
                row.update({f"asd_int_{k}": v for k, v in zip(PARAM_NAMES, record["asd_int"])})
                row.update({f"asd_res_{k}": v for k, v in zip(PARAM_NAMES, record["asd_res"])})
                row.update({f"asd_universal_{k}": v for k, v in zip(PARAM_NAMES, record.get("asd_universal", []))})
            rows.append(row)
        return pd.DataFrame(rows)


# ============================================
# REPLICATIONS
# ============================================

def replication_seed(master_seed: int, *key: int) -> np.random.SeedSequence:
    """Counter-based child seed; the same (master_seed, key) always yields the same stream"""
    return np.random.SeedSequence(master_seed, spawn_key=tuple(int(k) for k in key))


def _student_t(df: float) -> InnovationSampler:
    return partial(_draw_student_t, df)


def _draw_student_t(df: float, rng: np.random.Generator, size: int) -> np.ndarray:
    return rng.standard_t(df, size)


def _fit_config(spec: ExperimentSpec) -> mle.FitConfig:
    return mle.FitConfig(mode=spec.fit_mode, multistart=spec.multistart)


def _asd_vector(report: inference.AsdReport) -> List[float]:
    return report.as_array(PARAM_NAMES).tolist()


def _usable_path(path: SimulatedPath) -> ReturnSeries:
    """The series of a simulated path; an overflowed explosive path keeps its finite prefix"""
    if path.truncated and path.series.n < mle.MIN_OBSERVATIONS:
        raise ExperimentError(f"simulated path overflowed after {path.series.n} of {path.requested_n} points")
    return path.series


def _mle_replication(spec: ExperimentSpec, n: int, r: int) -> Dict[str, Any]:
    record: Dict[str, Any] = {"n": n, "r": r}
    try:
        path = simulate(spec.true_theta(), n, seed=replication_seed(spec.master_seed, n, r), burn_in=spec.burn_in)
        y = _usable_path(path)
        result = mle.fit(y, _fit_config(spec))
        sigma_res = inference.sigma_hat("res", result, y)
        if spec.regime() == "explosive":
            matrices = [inference.upsilon_hat(kind, result, y) for kind in inference.KINDS]
        else:
            matrices = [inference.sigma_hat("int", result, y), sigma_res]
        asd_int, asd_res = (_asd_vector(inference.asd(m, y.n)) for m in matrices)
        asd_universal = _asd_vector(inference.asd(inference.schur_complement(sigma_res), y.n))
        record.update(
            ok=True,
            truncated=path.truncated,
            estimate=result.theta_hat.as_array().tolist(),
            asd_int=asd_int,
            asd_res=asd_res,
            asd_universal=asd_universal,
        )
    except (SagarchError, np.linalg.LinAlgError) as err:
        record.update(ok=False, error=f"{type(err).__name__}: {err}")
    return record


def _alternative(spec: ExperimentSpec, axis: str, value: float):
    """(theta, innovation sampler or None) for one point of the alternative grid"""
    theta = spec.true_theta()
    sampler = _student_t(spec.df) if spec.innovation == "student_t" else None
    if axis == "alpha":
        theta = replace(theta, alpha=value)
    elif axis == "phi_minus":
        theta = replace(theta, phi_minus=value)
    else:
        sampler = _student_t(value)
    return theta, sampler


def _run_test(test_id: str, spec: ExperimentSpec, y) -> hypothesis_tests.TestReport:
    if test_id == "diagnostic":
        alpha_star = spec.alpha_star if spec.alpha_star is not None else spec.true_theta().alpha
        return hypothesis_tests.diagnostic_test(y, alpha_star, spec.level, _fit_config(spec))
    result = mle.fit(y, _fit_config(spec))
    if test_id == "symmetry":
        return hypothesis_tests.symmetry_test(result, y, spec.level)
    stationary, explosive = hypothesis_tests.stationarity_test(result, y, spec.level)
    return stationary if test_id == "stationarity" else explosive


def _test_replication(spec: ExperimentSpec, test_id: str, axis: str, index: int, value: float,
                      n: int, r: int) -> Dict[str, Any]:
    record: Dict[str, Any] = {"n": n, "r": r, "value": value}
    try:
        theta, sampler = _alternative(spec, axis, value)
        seed = replication_seed(spec.master_seed, n, r, index)
        path = simulate(theta, n, seed=seed, burn_in=spec.burn_in, innovations=sampler)
        report = _run_test(test_id, spec, _usable_path(path))
        record.update(ok=True, statistic=report.statistic, reject=bool(report.reject))
    except (SagarchError, np.linalg.LinAlgError) as err:
        record.update(ok=False, error=f"{type(err).__name__}: {err}")
    return record


def _execute(jobs: Sequence[Callable[[], Dict[str, Any]]], workers: int) -> List[Dict[str, Any]]:
    """Run jobs in order; results come back in submission order whatever the worker count"""
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            futures = [pool.submit(job) for job in jobs]
            return [future.result() for future in futures]
    return [job() for job in jobs]


def _check_failures(records: List[Dict[str, Any]], label: str) -> int:
    failures = [rec for rec in records if not rec.get("ok")]
    for rec in failures:
        logger.warning(f"{label}: replication {rec['r']} failed ({rec['error']})")
    if len(failures) > MAX_FAILURE_SHARE * len(records):
        raise ExperimentError(
            f"{label}: {len(failures)} of {len(records)} replications failed",
            failures=len(failures),
            replications=len(records),
        )
    return len(failures)


# ============================================
# EXPERIMENTS
# ============================================

def theoretical_asd(spec: ExperimentSpec, n: int) -> List[float]:
    """ASD row at the true theta (Sigma on a long reference path, or Upsilon for explosive designs)"""
    theta = spec.true_theta()
    try:
        if spec.regime() == "explosive":
            matrix = inference.population_upsilon(theta)
        else:
            matrix = inference.population_sigma(theta, spec.reference_length, seed=spec.master_seed)
        return _asd_vector(inference.asd(matrix, n))
    except SagarchError as err:
        logger.warning(f"Theoretical ASD unavailable for {spec.design_id}: {err}")
        return [float("nan")] * len(PARAM_NAMES)


def _aggregate(spec: ExperimentSpec, n: int, records: List[Dict[str, Any]], failures: int) -> CellResult:
    good = [rec for rec in records if rec.get("ok")]
    estimates = np.array([rec["estimate"] for rec in good])
    truth = spec.true_theta().as_array()
    esd = estimates.std(axis=0, ddof=1) if len(good) > 1 else np.zeros(len(PARAM_NAMES))
    nan_row = [float("nan")] * len(PARAM_NAMES)
    return CellResult(
        n=n,
        replications=len(records),
        failures=failures,
        bias=(estimates.mean(axis=0) - truth).tolist(),
        esd=esd.tolist(),
        asd=theoretical_asd(spec, n),
        asd_int=np.nanmean([rec["asd_int"] for rec in good], axis=0).tolist(),
        asd_res=np.nanmean([rec["asd_res"] for rec in good], axis=0).tolist(),
        asd_universal=np.nanmean([rec.get("asd_universal", nan_row) for rec in good], axis=0).tolist(),
        truncated=sum(bool(rec.get("truncated")) for rec in good),
    )


def run_mle_experiment(spec: ExperimentSpec) -> ExperimentResult:
    """Bias, ESD and ASD (theoretical, int, res, universal) per sample size"""
    if spec.innovation != "stable":
        raise ParameterError("MLE experiments use stable innovations only")
    started = time.perf_counter()
    result = ExperimentResult(spec=spec, kind="mle")
    for n in spec.sample_sizes:
        logger.info(f"{spec.design_id}: n={n}, {spec.replications} replication(s)")
        jobs = [partial(_mle_replication, spec, n, r) for r in range(spec.replications)]
        records = _execute(jobs, spec.workers)
        failures = _check_failures(records, f"{spec.design_id} n={n}")
        result.cells.append(_aggregate(spec, n, records, failures))
        result.records.extend(records)
    result.elapsed_seconds = time.perf_counter() - started
    return result


def run_test_experiment(spec: ExperimentSpec, test_id: str, axis: str,
                        values: Sequence[float]) -> ExperimentResult:
    """Rejection frequency of one test over a grid of alternatives (alpha, Student-t df or phi_minus)"""
    if test_id not in TEST_IDS:
        raise ParameterError(f"test must be one of {TEST_IDS}, got {test_id!r}")
    if axis not in AXES:
        raise ParameterError(f"axis must be one of {AXES}, got {axis!r}")
    if not len(values):
        raise ParameterError("alternative grid is empty")
    started = time.perf_counter()
    result = ExperimentResult(spec=spec, kind="test", test_id=test_id, axis=axis)
    for n in spec.sample_sizes:
        for index, value in enumerate(values):
            jobs = [
                partial(_test_replication, spec, test_id, axis, index, float(value), n, r)
                for r in range(spec.replications)
            ]
            records = _execute(jobs, spec.workers)
            failures = _check_failures(records, f"{test_id} n={n} {axis}={value:g}")
            good = [rec for rec in records if rec.get("ok")]
            frequency = float(np.mean([rec["reject"] for rec in good])) if good else float("nan")
            result.curve.append(RejectionPoint(n, float(value), frequency, len(records), failures))
            result.records.extend(records)
            logger.info(f"{test_id} n={n} {axis}={value:g}: rejection frequency {frequency:.3f}")
    result.elapsed_seconds = time.perf_counter() - started
    return result


def coherence(result: ExperimentResult, n: Optional[int] = None) -> Dict[str, float]:
    """|ESD - ASD| / ASD per vartheta coordinate at n (default: the largest n); omega excluded"""
    if result.kind != "mle" or not result.cells:
        raise ParameterError("coherence needs an MLE experiment result")
    cell = result.cell(n) if n is not None else max(result.cells, key=lambda c: c.n)
    out = {}
    for i, name in enumerate(PARAM_NAMES):
        if name not in VARTHETA:
            continue
        out[name] = abs(cell.esd[i] - cell.asd[i]) / cell.asd[i]
    return out
