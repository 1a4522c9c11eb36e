"""
Text Tables
Aligned plain-text renderings of fit reports and Monte Carlo results
"""

from typing import Any, Dict, List, Optional

from backend.montecarlo import ExperimentResult
from frontend.config import experiment_rows, parameters, tables, tests


def _number(value: Optional[float], fmt: str) -> str:
    if value is None:
        return tables.MISSING
    return format(value, fmt)


def _row(label: str, cells: List[str]) -> str:
    return label.ljust(tables.LABEL_WIDTH) + "".join(cell.rjust(tables.COLUMN_WIDTH) for cell in cells)


def render_fit_table(report: Dict[str, Any]) -> str:
    """Estimates with parenthesized ASDs, then log-lik, AIC, regime and test rows"""
    lines = [_row("", ["estimate", "(ASD)"])]
    for name in parameters.ORDER:
        entry = report["parameters"][name]
        asd = entry.get("asd")
        asd_text = f"({_number(asd, tables.ESTIMATE_FORMAT)})" if asd is not None else tables.MISSING
        label = parameters.LABELS[name] + ("*" if entry.get("flag") else "")
        lines.append(_row(label, [_number(entry["estimate"], tables.ESTIMATE_FORMAT), asd_text]))

    lines.append(_row("log-lik", [_number(report["loglik"], ".2f")]))
    lines.append(_row("AIC", [_number(report["aic"], ".2f")]))
    regime = report.get("regime")
    if regime:
        lines.append(_row("gamma", [_number(regime["gamma_hat"], tables.ESTIMATE_FORMAT), regime["regime"]]))

    if report.get("tests"):
        lines.append(_row("", ["statistic", "p-value"]))
        for entry in report["tests"]:
            label = tests.LABELS.get(entry["name"], entry["name"])
            lines.append(_row(label, [
                _number(entry["statistic"], tables.STATISTIC_FORMAT),
                _number(entry["p_value"], tables.STATISTIC_FORMAT),
            ]))
    flagged = [name for name in parameters.ORDER if report["parameters"][name].get("flag")]
    if flagged:
        notes = ", ".join(f"{parameters.LABELS[n]}: {report['parameters'][n]['flag']}" for n in flagged)
        lines.append(f"* {notes}")
    return "\n".join(lines) + "\n"


def render_experiment_table(result: ExperimentResult) -> str:
    """One block per sample size with Bias/ESD/ASD rows, or a rejection-frequency curve"""
    fmt = tables.ESTIMATE_FORMAT
    if result.kind != "mle":
        lines = [f"{result.test_id} over {result.axis}", _row("n", [result.axis, "reject", "failed"])]
        for point in result.curve:
            lines.append(_row(str(point.n), [
                format(point.value, "g"), _number(point.frequency, ".3f"), str(point.failures),
            ]))
        return "\n".join(lines) + "\n"

    header = [parameters.LABELS[name] for name in parameters.ORDER]
    lines = [f"{result.spec.design_id}: theta0 = {tuple(result.spec.true_theta().as_array().tolist())}"]
    for cell in result.cells:
        lines.append(_row(f"n={cell.n}", header))
        for key in experiment_rows.ROWS:
            lines.append(_row(experiment_rows.LABELS[key], [_number(v, fmt) for v in getattr(cell, key)]))
        if cell.failures:
            lines.append(f"  ({cell.failures} of {cell.replications} replications failed)")
        if cell.truncated:
            lines.append(f"  ({cell.truncated} overflowed path(s) fitted on their finite prefix)")
    return "\n".join(lines) + "\n"
