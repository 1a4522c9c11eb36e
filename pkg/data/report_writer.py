"""
Report Writer
Fit/test reports and experiment results as JSON with stable key order
NaN and infinities are written as null
"""

import json
import logging
import math
from pathlib import Path
from typing import Any, Dict, List, Optional, Sequence, Union

from backend.exceptions import DataError
from backend.hypothesis_tests import TestReport
from backend.inference import AsdReport
from backend.mle import FitResult
from backend.montecarlo import ExperimentResult
from backend.sagarch_model import PARAM_NAMES

logger = logging.getLogger(__name__)

NON_INFERENTIAL = "non-inferential"


def _clean(value: Any) -> Any:
    """Recursively replace non-finite floats with None and numpy scalars with Python ones"""
    if isinstance(value, dict):
        return {str(k): _clean(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_clean(v) for v in value]
    if hasattr(value, "item") and not isinstance(value, (str, bytes)):
        value = value.item()
    if isinstance(value, float) and not math.isfinite(value):
        return None
    return value


def build_fit_report(fit: FitResult, asd: Optional[AsdReport] = None,
                     tests: Sequence[TestReport] = ()) -> Dict[str, Any]:
    """Table-style report: estimates with ASDs, log-likelihood, AIC, regime and tests"""
    parameters: Dict[str, Dict[str, Any]] = {}
    for name, estimate in fit.theta_hat.as_dict().items():
        entry: Dict[str, Any] = {
            "estimate": estimate,
            "asd": asd.asd.get(name) if asd is not None else None,
            "asd_source": asd.source if asd is not None else None,
        }
        if name == "omega" and not fit.omega_inferential:
            entry["flag"] = NON_INFERENTIAL
        if name == "alpha" and fit.fixed_alpha is not None:
            entry["flag"] = "fixed"
        parameters[name] = entry

    report: Dict[str, Any] = {
        "parameters": parameters,
        "loglik": fit.loglik,
        "aic": fit.aic,
        "n": fit.n,
        "mode": fit.mode,
        "converged": fit.converged,
        "regime": fit.regime_estimate.as_dict() if fit.regime_estimate is not None else None,
        "tests": [_test_entry(t) for t in tests],
    }
    if asd is not None:
        report["asd_pseudo_inverse"] = asd.pseudo_inverse
        if asd.selected is not None:
            report["asd_auto_selected"] = asd.selected
    return report


def _test_entry(report: TestReport) -> Dict[str, Any]:
    entry = report.as_dict()
    entry["name"] = entry.pop("test")
    return entry


def dumps(payload: Dict[str, Any]) -> str:
    return json.dumps(_clean(payload), sort_keys=True, indent=2, allow_nan=False) + "\n"


def _write(text: str, path: Union[str, Path]) -> Path:
    path = Path(path)
    try:
        path.write_text(text, encoding="utf-8")
    except OSError as err:
        raise DataError(f"cannot write report to {path}: {err}") from err
    logger.info(f"Wrote {path}")
    return path


def emit_report(fit: Optional[FitResult] = None, path: Union[str, Path, None] = None,
                asd: Optional[AsdReport] = None, tests: Sequence[TestReport] = ()) -> str:
    """Serialize a fit and/or test results; writes to path when given and returns the JSON text"""
    if fit is None and not tests:
        raise DataError("nothing to report")
    payload = build_fit_report(fit, asd, tests) if fit is not None else {"tests": [_test_entry(t) for t in tests]}
    text = dumps(payload)
    if path is not None:
        _write(text, path)
    return text


def emit_experiment(result: ExperimentResult, path: Union[str, Path, None] = None,
                    csv_path: Union[str, Path, None] = None) -> str:
    """Experiment aggregates as JSON; optional per-replication CSV of estimates"""
    text = dumps(result.to_dict())
    if path is not None:
        _write(text, path)
    if csv_path is not None:
        frame = result.estimates_frame()
        try:
            frame.to_csv(csv_path, index=False, float_format="%.12g")
        except OSError as err:
            raise DataError(f"cannot write replication CSV to {csv_path}: {err}") from err
    return text


def parse_report(text: str) -> Dict[str, Any]:
    try:
        return json.loads(text)
    except json.JSONDecodeError as err:
        raise DataError(f"malformed report: {err}") from err


def load_report(path: Union[str, Path]) -> Dict[str, Any]:
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as err:
        raise DataError(f"cannot read report {path}: {err}") from err
    return parse_report(text)


def parameter_rows(report: Dict[str, Any]) -> List[Dict[str, Any]]:
    """Report parameters in theta order, for table rendering"""
    return [dict(name=name, **report["parameters"][name]) for name in PARAM_NAMES]
